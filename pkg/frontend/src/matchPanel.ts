/** Live match panel state: debounced per-catalog queries with stale-response
 * suppression. A failed refresh keeps the last good result and surfaces the
 * error inline.
 */

import type { MatchPayload, TagAssignment } from './types.js'

/** The one endpoint this panel needs; ApiClient satisfies it. */
export interface MatchApi {
    match(tags: TagAssignment, catalogId: string, k: number): Promise<MatchPayload>
}

export interface PanelState {
    catalogId: string
    result: MatchPayload | null
    error: string | null
    loading: boolean
}

export type CancelFn = () => void
export type Scheduler = (fn: () => void, delayMs: number) => CancelFn

const defaultScheduler: Scheduler = (fn, delayMs) => {
    const handle = setTimeout(fn, delayMs)
    return () => clearTimeout(handle)
}

export class LiveMatchPanel {
    private readonly states = new Map<string, PanelState>()
    private pendingCancel: CancelFn | null = null
    private generation = 0

    constructor(
        private readonly api: MatchApi,
        readonly catalogIds: string[],
        private readonly k: number,
        private readonly debounceMs = 200,
        private readonly schedule: Scheduler = defaultScheduler,
        private readonly onChange: (states: PanelState[]) => void = () => {},
    ) {
        for (const catalogId of catalogIds) {
            this.states.set(catalogId, { catalogId, result: null, error: null, loading: false })
        }
    }

    snapshot(): PanelState[] {
        return this.catalogIds.map(catalogId => ({ ...this.state(catalogId) }))
    }

    private state(catalogId: string): PanelState {
        const state = this.states.get(catalogId)
        if (!state) throw new Error(`unknown catalog ${catalogId}`)
        return state
    }

    /** Call on every tag change; queries fire after the debounce window. */
    tagsChanged(tags: TagAssignment): void {
        if (this.pendingCancel) this.pendingCancel()
        const snapshot = { ...tags }
        this.pendingCancel = this.schedule(() => {
            this.pendingCancel = null
            void this.refresh(snapshot)
        }, this.debounceMs)
    }

    /** Immediate refresh of every catalog panel. */
    async refresh(tags: TagAssignment): Promise<void> {
        const generation = ++this.generation
        for (const catalogId of this.catalogIds) {
            this.state(catalogId).loading = true
        }
        this.onChange(this.snapshot())
        await Promise.all(
            this.catalogIds.map(async catalogId => {
                const state = this.state(catalogId)
                try {
                    const result = await this.api.match(tags, catalogId, this.k)
                    if (generation !== this.generation) return
                    state.result = result
                    state.error = null
                } catch (error) {
                    if (generation !== this.generation) return
                    // keep state.result: last good matches stay on screen
                    state.error = error instanceof Error ? error.message : String(error)
                } finally {
                    if (generation === this.generation) state.loading = false
                }
            }),
        )
        if (generation === this.generation) this.onChange(this.snapshot())
    }
}
