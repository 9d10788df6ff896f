/** End-to-end contract tests against a live tagmatch service.
 *
 * Spawns the engine's `serve` command on the committed fixtures, then drives
 * the UI modules through their real HTTP paths: schema-driven form, live
 * match panel, submission queue, and agreement dashboard.
 */

import assert from 'node:assert/strict'
import { spawn, type ChildProcess } from 'node:child_process'
import { mkdtempSync, readFileSync } from 'node:fs'
import { createServer } from 'node:net'
import { tmpdir } from 'node:os'
import { join, resolve } from 'node:path'
import { after, before, test } from 'node:test'
import { fileURLToPath } from 'node:url'

import { ApiClient } from '../src/api.js'
import { TagForm } from '../src/formModel.js'
import { LiveMatchPanel } from '../src/matchPanel.js'
import { AnnotationSession, MemoryStore } from '../src/sessionQueue.js'
import { agreementRows } from '../src/agreementView.js'
import type { TagAssignment } from '../src/types.js'

const HERE = fileURLToPath(new URL('.', import.meta.url))
const REPO_ROOT = resolve(HERE, '..', '..', '..') // build/tests -> frontend -> repo
const FIXTURES = join(REPO_ROOT, 'tests', 'fixtures')
const PYTHON = process.env['TAGMATCH_PY'] ?? 'python3'

let service: ChildProcess
let base = ''
let api: ApiClient

function freePort(): Promise<number> {
    return new Promise((resolvePort, reject) => {
        const probe = createServer()
        probe.once('error', reject)
        probe.listen(0, '127.0.0.1', () => {
            const address = probe.address()
            if (address === null || typeof address === 'string') {
                reject(new Error('no port'))
                return
            }
            probe.close(() => resolvePort(address.port))
        })
    })
}

async function waitForHealth(url: string, timeoutMs = 20000): Promise<void> {
    const deadline = Date.now() + timeoutMs
    while (Date.now() < deadline) {
        try {
            const response = await fetch(`${url}/healthz`)
            if (response.ok) return
        } catch {
            // not up yet
        }
        await new Promise(r => setTimeout(r, 100))
    }
    throw new Error(`service at ${url} did not become healthy`)
}

before(async () => {
    const port = await freePort()
    base = `http://127.0.0.1:${port}`
    const storePath = join(mkdtempSync(join(tmpdir(), 'tagmatch-ui-')), 'log.jsonl')
    service = spawn(
        PYTHON,
        [
            '-m', 'tagmatch.cli', 'serve',
            '--bind', `127.0.0.1:${port}`,
            '--catalog', `bitmoji=${join(FIXTURES, 'catalog_bitmoji.jsonl')}`,
            '--catalog', `cartoonset=${join(FIXTURES, 'catalog_cartoonset.jsonl')}`,
            '--store', storePath,
        ],
        { stdio: 'ignore' },
    )
    await waitForHealth(base)
    api = new ApiClient(base)
})

after(() => {
    service.kill('SIGTERM')
})

function knownAssetTags(): { assetId: string; tags: TagAssignment } {
    const line = readFileSync(join(FIXTURES, 'catalog_bitmoji.jsonl'), 'utf-8')
        .split('\n')
        .filter(Boolean)[7] as string
    const asset = JSON.parse(line) as { asset_id: string; tags: TagAssignment }
    return { assetId: asset.asset_id, tags: asset.tags }
}

/** Fill like an annotator would: gates first, then the controls they enable. */
function fillForm(form: TagForm, tags: TagAssignment): void {
    for (let pass = 0; pass < 2; pass += 1) {
        for (const [attrId, value] of Object.entries(tags)) {
            if (form.isEnabled(attrId) && form.control(attrId).value === null) {
                form.setValue(attrId, value)
            }
        }
    }
}

test('form built from GET /schema renders 9 controls in 3 groups', async () => {
    const schema = await api.schema()
    const form = new TagForm(schema)
    const groups = form.groups()
    assert.equal(groups.length, 3)
    assert.equal(groups.reduce((n, g) => n + g.controls.length, 0), 9)
    assert.ok(form.missingAttributes().length > 0, 'fresh form is incomplete')
})

test('tags equal to a known asset put it at rank 1 with score 0', async () => {
    const schema = await api.schema()
    const { assetId, tags } = knownAssetTags()
    const form = new TagForm(schema)
    fillForm(form, tags)
    assert.ok(form.isReadyForMatching())

    const panel = new LiveMatchPanel(api, ['bitmoji', 'cartoonset'], 5)
    await panel.refresh(form.toMatchTags())
    const states = panel.snapshot()
    assert.equal(states.length, 2, 'one panel per configured catalog')
    const bitmoji = states.find(s => s.catalogId === 'bitmoji')
    assert.ok(bitmoji?.result)
    const top = bitmoji.result.matches[0]
    assert.equal(top?.asset_id, assetId)
    assert.equal(top?.rank, 1)
    assert.equal(top?.score, '0')
    assert.equal(top?.breakdown.total, '0')
})

test('submitting appends exactly one annotation retrievable via the API', async () => {
    const schema = await api.schema()
    const { tags } = knownAssetTags()
    const subjectId = `ui_subject_${Date.now()}`
    const session = new AnnotationSession(
        api, 'ui_annotator',
        [{ id: subjectId, image_url: '' }],
        new MemoryStore(),
        'itest',
        () => 1_700_000_999,
    )
    const form = new TagForm(schema)
    fillForm(form, tags)
    assert.ok(form.isComplete())
    const annotation = session.submit(form.toTagVector())
    const report = await session.flush()
    assert.deepEqual(report, { sent: 1, failed: 0 })

    const stored = await api.subjectAnnotations(subjectId)
    assert.equal(stored.annotations.length, 1)
    assert.deepEqual(stored.annotations[0], annotation)

    // a lost-ack retry resends the identical record; the store keeps one copy
    await api.submitAnnotation(annotation)
    const again = await api.subjectAnnotations(subjectId)
    assert.equal(again.annotations.length, 1)
    assert.deepEqual(again.annotations[0], annotation)
})

test('agreement dashboard renders service-produced rows', async () => {
    // seed two annotators on one subject so the dashboard has data
    const { tags } = knownAssetTags()
    const subjectId = `agree_subject_${Date.now()}`
    for (const annotator of ['dash_a', 'dash_b']) {
        await api.submitAnnotation({
            annotator_id: annotator,
            subject_id: subjectId,
            subject_kind: 'human',
            tags,
            created_at: 1_700_000_500,
        })
    }
    const payload = await api.agreement('bitmoji', 2)
    const rows = agreementRows(payload)
    assert.equal(rows[0]?.label, 'Tag level')
    assert.deepEqual(rows.slice(1).map(r => r.label), ['Final Top-1', 'Final Top-2'])
    assert.ok(rows.every(r => r.total >= 1))
})

test('service errors surface through the client with code and message', async () => {
    await assert.rejects(
        api.match({ nope: 1 }, 'bitmoji', 5),
        (error: Error & { code?: string; status?: number }) => {
            assert.equal(error.status, 400)
            assert.equal(error.code, 'invalid_tags')
            return true
        },
    )
    await assert.rejects(
        api.match(knownAssetTags().tags, 'ghost', 5),
        (error: Error & { status?: number }) => {
            assert.equal(error.status, 404)
            return true
        },
    )
})
