/** Shapes the agreement payload into display rows for the dashboard. */

import type { AgreementPayload } from './types.js'

export interface AgreementDisplayRow {
    label: string
    agreeing: number
    total: number
    percent: string
}

export function formatRatePercent(agreeing: number, total: number): string {
    if (total === 0) return '0.0%'
    return `${((agreeing / total) * 100).toFixed(1)}%`
}

export function agreementRows(payload: AgreementPayload): AgreementDisplayRow[] {
    const rows: AgreementDisplayRow[] = [
        {
            label: 'Tag level',
            agreeing: payload.tag_level.subjects_agreeing,
            total: payload.tag_level.subjects_total,
            percent: formatRatePercent(payload.tag_level.subjects_agreeing, payload.tag_level.subjects_total),
        },
    ]
    for (const row of payload.topk) {
        rows.push({
            label: `Final Top-${row.k}`,
            agreeing: row.subjects_agreeing,
            total: row.subjects_total,
            percent: formatRatePercent(row.subjects_agreeing, row.subjects_total),
        })
    }
    return rows
}
