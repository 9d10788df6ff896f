/** Browser entry: wires config, schema form, live match panels, submission
 * queue, and the agreement dashboard together. All scoring comes from the
 * service; this file only renders state.
 */

import { ApiClient } from './api.js'
import { loadConfig, type UiConfig } from './config.js'
import { TagForm } from './formModel.js'
import { LiveMatchPanel, type PanelState } from './matchPanel.js'
import { AnnotationSession } from './sessionQueue.js'
import { agreementRows } from './agreementView.js'
import type { MatchEntry, SchemaPayload } from './types.js'

function el<K extends keyof HTMLElementTagNameMap>(
    tag: K,
    className?: string,
    text?: string,
): HTMLElementTagNameMap[K] {
    const node = document.createElement(tag)
    if (className) node.className = className
    if (text !== undefined) node.textContent = text
    return node
}

function blockingError(message: string): void {
    const root = document.getElementById('app') ?? document.body
    root.replaceChildren()
    const panel = el('div', 'error-panel')
    panel.append(el('h2', undefined, 'Cannot start the annotator'), el('p', undefined, message))
    root.append(panel)
}

function breakdownTitle(entry: MatchEntry): string {
    const lines = [`total ${entry.breakdown.total}`]
    for (const [attrId, component] of Object.entries(entry.breakdown.per_attribute)) {
        const flag = component.applicable ? '' : ' (skipped)'
        lines.push(`${attrId}: ${component.weighted}${flag}`)
    }
    return lines.join('\n')
}

class AnnotatorApp {
    private readonly api: ApiClient
    private readonly form: TagForm
    private readonly session: AnnotationSession
    private readonly panel: LiveMatchPanel | null
    private readonly root: HTMLElement

    constructor(
        private readonly config: UiConfig,
        schema: SchemaPayload,
        annotatorId: string,
        liveFeedback: boolean,
    ) {
        this.api = new ApiClient(config.service_base_url)
        this.form = new TagForm(schema)
        this.session = new AnnotationSession(this.api, annotatorId, config.subjects, window.localStorage)
        this.panel = liveFeedback
            ? new LiveMatchPanel(
                  this.api,
                  config.catalog_ids,
                  config.default_k,
                  200,
                  undefined,
                  states => this.renderPanels(states),
              )
            : null
        this.root = document.getElementById('app') as HTMLElement
    }

    start(): void {
        this.root.replaceChildren()
        const layout = el('div', 'layout')
        layout.append(this.buildSubjectPane(), this.buildFormPane(), this.buildMatchPane())
        this.root.append(layout, this.buildAgreementPane())
        this.renderSubject()
        this.renderForm()
        this.renderSubmit()
        void this.session.flush()
    }

    // -- subject ------------------------------------------------------------

    private buildSubjectPane(): HTMLElement {
        const pane = el('section', 'pane subject-pane')
        pane.append(el('h2', undefined, 'Subject'))
        pane.append(el('div', 'subject-image'))
        pane.append(el('div', 'subject-id'))
        pane.append(el('div', 'progress'))
        return pane
    }

    private renderSubject(): void {
        const subject = this.session.currentSubject()
        const image = this.root.querySelector('.subject-image') as HTMLElement
        const label = this.root.querySelector('.subject-id') as HTMLElement
        const progress = this.root.querySelector('.progress') as HTMLElement
        const { done, total } = this.session.progress()
        progress.textContent = `progress: ${done} / ${total}` +
            (this.session.pendingCount() ? ` (${this.session.pendingCount()} unsent)` : '')
        image.replaceChildren()
        if (!subject) {
            label.textContent = 'session complete'
            return
        }
        label.textContent = subject.id
        if (subject.image_url) {
            const img = el('img')
            img.src = subject.image_url
            img.alt = subject.id
            img.onerror = () => img.replaceWith(el('div', 'image-badge', subject.id))
            image.append(img)
        } else {
            image.append(el('div', 'image-badge', subject.id))
        }
    }

    // -- form ---------------------------------------------------------------

    private buildFormPane(): HTMLElement {
        const pane = el('section', 'pane form-pane')
        pane.append(el('h2', undefined, 'Tags'))
        pane.append(el('form', 'tag-form'))
        const submit = el('button', 'submit-button', 'Submit annotation')
        submit.type = 'button'
        submit.addEventListener('click', () => void this.submit())
        pane.append(submit)
        pane.append(el('div', 'submit-status'))
        return pane
    }

    private renderForm(): void {
        const formEl = this.root.querySelector('.tag-form') as HTMLFormElement
        formEl.replaceChildren()
        for (const group of this.form.groups()) {
            const fieldset = el('fieldset', 'region-group')
            fieldset.append(el('legend', undefined, group.region))
            for (const control of group.controls) {
                const attr = control.attribute
                const enabled = this.form.isEnabled(attr.id)
                const missing = enabled && control.value === null
                const wrapper = el('div', 'control' + (missing ? ' missing' : '') + (enabled ? '' : ' disabled'))
                wrapper.dataset['attribute'] = attr.id
                wrapper.append(el('label', 'control-label', attr.display_name))
                if (control.kind === 'scale') {
                    wrapper.append(this.buildScale(attr.id, attr.options, control.value, enabled))
                } else {
                    wrapper.append(this.buildGrid(attr.id, attr.options, control.value, enabled))
                }
                fieldset.append(wrapper)
            }
            formEl.append(fieldset)
        }
    }

    private buildScale(attrId: string, options: string[], value: number | null, enabled: boolean): HTMLElement {
        const holder = el('div', 'scale-control')
        const input = el('input')
        input.type = 'range'
        input.min = '0'
        input.max = String(options.length - 1)
        input.step = '1'
        input.value = value === null ? '0' : String(value)
        input.disabled = !enabled
        const caption = el('span', 'scale-caption', value === null ? 'unset' : options[value])
        input.addEventListener('input', () => {
            this.onTagChange(attrId, Number(input.value))
            caption.textContent = options[Number(input.value)] ?? ''
        })
        holder.append(input, caption)
        return holder
    }

    private buildGrid(attrId: string, options: string[], value: number | null, enabled: boolean): HTMLElement {
        const grid = el('div', 'option-grid')
        options.forEach((option, index) => {
            const button = el('button', 'option' + (value === index ? ' selected' : ''), option)
            button.type = 'button'
            button.disabled = !enabled
            button.addEventListener('click', () => this.onTagChange(attrId, index))
            grid.append(button)
        })
        return grid
    }

    private onTagChange(attrId: string, index: number): void {
        this.form.setValue(attrId, index)
        this.renderForm()
        this.renderSubmit()
        if (this.panel) {
            if (this.form.isReadyForMatching()) {
                this.panel.tagsChanged(this.form.toMatchTags())
            } else {
                this.renderPanels(this.panel.snapshot())
            }
        }
    }

    private renderSubmit(): void {
        const button = this.root.querySelector('.submit-button') as HTMLButtonElement
        button.disabled = !this.form.isComplete() || this.session.currentSubject() === null
    }

    private async submit(): Promise<void> {
        const status = this.root.querySelector('.submit-status') as HTMLElement
        try {
            this.session.submit(this.form.toTagVector())
        } catch (error) {
            status.textContent = error instanceof Error ? error.message : String(error)
            return
        }
        const report = await this.session.flush()
        status.textContent = report.failed
            ? `saved locally; ${report.failed} submission(s) queued for retry`
            : 'submitted'
        this.form.reset()
        this.renderSubject()
        this.renderForm()
        this.renderSubmit()
    }

    // -- live matches ---------------------------------------------------------

    private buildMatchPane(): HTMLElement {
        const pane = el('section', 'pane match-pane')
        pane.append(el('h2', undefined, 'Closest assets'))
        const holder = el('div', 'panels')
        if (this.panel) {
            for (const catalogId of this.config.catalog_ids) {
                const panel = el('div', 'catalog-panel')
                panel.dataset['catalog'] = catalogId
                panel.append(el('h3', undefined, catalogId), el('div', 'panel-body', 'answer all ungated tags to see matches'))
                holder.append(panel)
            }
        } else {
            holder.append(el('p', 'feedback-off', 'live feedback disabled (?feedback=off)'))
        }
        pane.append(holder)
        return pane
    }

    private renderPanels(states: PanelState[]): void {
        for (const state of states) {
            const panel = this.root.querySelector(`.catalog-panel[data-catalog="${state.catalogId}"]`)
            if (!panel) continue
            const body = panel.querySelector('.panel-body') as HTMLElement
            body.replaceChildren()
            if (state.error) {
                body.append(el('div', 'inline-error', `service error: ${state.error}`))
            }
            if (!state.result) {
                if (!state.error) {
                    body.append(el('p', undefined, state.loading ? 'loading…' : 'answer all ungated tags to see matches'))
                }
                continue
            }
            const list = el('ol', 'match-list')
            for (const entry of state.result.matches) {
                const item = el('li', 'match-entry')
                item.title = breakdownTitle(entry)
                const img = el('img', 'thumb')
                img.src = `${this.config.image_base_url}/${entry.asset_id}.png`
                img.alt = entry.asset_id
                img.onerror = () => img.replaceWith(el('span', 'asset-badge', entry.asset_id))
                item.append(img, el('span', 'asset-id', entry.asset_id), el('span', 'score', entry.score))
                list.append(item)
            }
            body.append(list)
        }
    }

    // -- agreement dashboard ----------------------------------------------------

    private buildAgreementPane(): HTMLElement {
        const pane = el('section', 'pane agreement-pane')
        pane.append(el('h2', undefined, 'Agreement dashboard'))
        const button = el('button', 'refresh-agreement', 'Refresh agreement')
        button.type = 'button'
        const table = el('table', 'agreement-table')
        button.addEventListener('click', () => void this.renderAgreement(table))
        pane.append(button, table)
        return pane
    }

    private async renderAgreement(table: HTMLTableElement): Promise<void> {
        const catalogId = this.config.catalog_ids[0]
        if (!catalogId) return
        table.replaceChildren()
        try {
            const payload = await this.api.agreement(catalogId, 4)
            const header = el('tr')
            for (const text of ['row', 'agreeing', 'total', 'rate']) header.append(el('th', undefined, text))
            table.append(header)
            for (const row of agreementRows(payload)) {
                const tr = el('tr')
                tr.append(
                    el('td', undefined, row.label),
                    el('td', undefined, String(row.agreeing)),
                    el('td', undefined, String(row.total)),
                    el('td', undefined, row.percent),
                )
                table.append(tr)
            }
        } catch (error) {
            const tr = el('tr')
            tr.append(el('td', 'inline-error', `agreement unavailable: ${error instanceof Error ? error.message : error}`))
            table.append(tr)
        }
    }
}

async function boot(): Promise<void> {
    const params = new URLSearchParams(window.location.search)
    let config: UiConfig
    let schema: SchemaPayload
    try {
        config = await loadConfig(params.get('config') ?? 'config.json')
        schema = await new ApiClient(config.service_base_url).schema()
    } catch (error) {
        blockingError(error instanceof Error ? error.message : String(error))
        return
    }
    const annotatorId = params.get('annotator') ?? `annotator_${Math.random().toString(36).slice(2, 8)}`
    const liveFeedback = params.get('feedback') !== 'off'
    new AnnotatorApp(config, schema, annotatorId, liveFeedback).start()
}

if (typeof document !== 'undefined' && document.getElementById('app')) {
    void boot()
}
