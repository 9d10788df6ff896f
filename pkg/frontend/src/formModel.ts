/** Schema-driven tag form state.
 *
 * One control per attribute, grouped by region in schema order. Continuous
 * attributes render as ordered scales, discrete ones as option grids. Gated
 * controls stay disabled until the gating attribute holds the opening option;
 * they always carry a stored index (default 0) so a submitted vector contains
 * every attribute, matching the engine's always-present rule.
 */

import type { SchemaAttribute, SchemaPayload, TagAssignment } from './types.js'

export type ControlKind = 'scale' | 'grid'

export interface FormControl {
    attribute: SchemaAttribute
    kind: ControlKind
    /** Explicit user choice; null until the annotator answers. */
    value: number | null
}

export interface FormGroup {
    region: string
    controls: FormControl[]
}

export class TagForm {
    private readonly controls = new Map<string, FormControl>()
    private readonly order: string[] = []

    constructor(readonly schema: SchemaPayload) {
        for (const attribute of schema.attributes) {
            this.controls.set(attribute.id, {
                attribute,
                kind: attribute.kind === 'continuous' ? 'scale' : 'grid',
                value: null,
            })
            this.order.push(attribute.id)
        }
    }

    /** Region groups in schema order; regions keep first-appearance order. */
    groups(): FormGroup[] {
        const groups: FormGroup[] = []
        const byRegion = new Map<string, FormGroup>()
        for (const attrId of this.order) {
            const control = this.control(attrId)
            let group = byRegion.get(control.attribute.region)
            if (!group) {
                group = { region: control.attribute.region, controls: [] }
                byRegion.set(control.attribute.region, group)
                groups.push(group)
            }
            group.controls.push(control)
        }
        return groups
    }

    control(attrId: string): FormControl {
        const control = this.controls.get(attrId)
        if (!control) throw new Error(`unknown attribute ${attrId}`)
        return control
    }

    setValue(attrId: string, index: number): void {
        const control = this.control(attrId)
        const cardinality = control.attribute.options.length
        if (!Number.isInteger(index) || index < 0 || index >= cardinality) {
            throw new Error(`index ${index} out of range for ${attrId} (cardinality ${cardinality})`)
        }
        control.value = index
    }

    clearValue(attrId: string): void {
        this.control(attrId).value = null
    }

    /** A gated control is enabled only while its gate holds the opening option. */
    isEnabled(attrId: string): boolean {
        const gate = this.control(attrId).attribute.gated_by
        if (gate === null) return true
        return this.control(gate.attribute).value === gate.option
    }

    /** Enabled controls the annotator has not answered yet. */
    missingAttributes(): string[] {
        return this.order.filter(attrId => this.isEnabled(attrId) && this.control(attrId).value === null)
    }

    /** Submittable: every currently-enabled control has an explicit answer. */
    isComplete(): boolean {
        return this.missingAttributes().length === 0
    }

    /** Live matching needs every ungated attribute answered. */
    isReadyForMatching(): boolean {
        return this.order.every(
            attrId => this.control(attrId).attribute.gated_by !== null || this.control(attrId).value !== null,
        )
    }

    /** Provisional vector for live matching: unanswered slots fall back to 0. */
    toMatchTags(): TagAssignment {
        const tags: TagAssignment = {}
        for (const attrId of this.order) {
            tags[attrId] = this.control(attrId).value ?? 0
        }
        return tags
    }

    /**
     * Final vector for submission. Requires completeness; disabled gated
     * controls contribute their stored (ignored) index, 0 if never touched.
     */
    toTagVector(): TagAssignment {
        if (!this.isComplete()) {
            throw new Error(`form incomplete: missing ${this.missingAttributes().join(', ')}`)
        }
        return this.toMatchTags()
    }

    reset(): void {
        for (const control of this.controls.values()) {
            control.value = null
        }
    }

    answeredCount(): number {
        return this.order.filter(attrId => this.control(attrId).value !== null).length
    }
}
