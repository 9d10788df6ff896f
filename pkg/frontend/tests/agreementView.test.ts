import assert from 'node:assert/strict'
import { test } from 'node:test'

import { agreementRows, formatRatePercent } from '../src/agreementView.js'
import type { AgreementPayload } from '../src/types.js'

const PAYLOAD: AgreementPayload = {
    catalog_id: 'bitmoji',
    k_max: 2,
    policy: { level: 'per_attribute', quorum: 2, topk_rule: 'shared' },
    tag_level: { subjects_total: 100, subjects_agreeing: 90, rate: '0.9' },
    topk: [
        { k: 1, subjects_total: 100, subjects_agreeing: 82, rate: '0.82' },
        { k: 2, subjects_total: 100, subjects_agreeing: 90, rate: '0.9' },
    ],
}

test('dashboard rows mirror the payload shape', () => {
    const rows = agreementRows(PAYLOAD)
    assert.deepEqual(rows.map(r => r.label), ['Tag level', 'Final Top-1', 'Final Top-2'])
    assert.deepEqual(rows.map(r => r.percent), ['90.0%', '82.0%', '90.0%'])
    assert.equal(rows[1]?.agreeing, 82)
})

test('percent formatting handles the empty edge', () => {
    assert.equal(formatRatePercent(0, 0), '0.0%')
    assert.equal(formatRatePercent(1, 3), '33.3%')
})
