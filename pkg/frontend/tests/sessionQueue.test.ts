import assert from 'node:assert/strict'
import { test } from 'node:test'

import { AnnotationSession, MemoryStore, submissionKey, type SubmitApi } from '../src/sessionQueue.js'
import type { Annotation } from '../src/types.js'

const SUBJECTS = [
    { id: 's1', image_url: '' },
    { id: 's2', image_url: '' },
    { id: 's3', image_url: '' },
]

const TAGS = { a: 1, b: 0 }

class FakeApi implements SubmitApi {
    received: Annotation[] = []
    failing = false

    async submitAnnotation(annotation: Annotation): Promise<{ status: string }> {
        if (this.failing) throw new Error('offline')
        this.received.push(annotation)
        return { status: 'accepted' }
    }
}

function session(api: SubmitApi, storage: MemoryStore, now = () => 1000): AnnotationSession {
    return new AnnotationSession(api, 'annie', SUBJECTS, storage, 'test', now)
}

test('submitting advances the cursor and flush sends the record', async () => {
    const api = new FakeApi()
    const storage = new MemoryStore()
    const s = session(api, storage)
    assert.equal(s.currentSubject()?.id, 's1')
    s.submit(TAGS)
    assert.equal(s.currentSubject()?.id, 's2')
    assert.deepEqual(s.progress(), { done: 1, total: 3 })
    const report = await s.flush()
    assert.deepEqual(report, { sent: 1, failed: 0 })
    assert.equal(api.received.length, 1)
    assert.deepEqual(api.received[0]?.tags, TAGS)
    assert.equal(s.pendingCount(), 0)
})

test('cursor survives a reload', async () => {
    const api = new FakeApi()
    const storage = new MemoryStore()
    const first = session(api, storage)
    first.submit(TAGS)
    first.submit(TAGS)
    await first.flush()

    const reloaded = session(api, storage)
    assert.equal(reloaded.currentSubject()?.id, 's3')
    assert.deepEqual(reloaded.progress(), { done: 2, total: 3 })
})

test('offline submissions queue, survive reload, and retry without duplicates', async () => {
    const api = new FakeApi()
    api.failing = true
    const storage = new MemoryStore()
    const offline = session(api, storage)
    offline.submit(TAGS)
    const failed = await offline.flush()
    assert.deepEqual(failed, { sent: 0, failed: 1 })
    assert.equal(offline.pendingCount(), 1)

    // reload while still offline: the outbox is restored from storage
    const reloaded = session(api, storage)
    assert.equal(reloaded.pendingCount(), 1)

    api.failing = false
    const retried = await reloaded.flush()
    assert.deepEqual(retried, { sent: 1, failed: 0 })
    assert.equal(api.received.length, 1)

    // a second flush is a no-op; nothing is sent twice
    const again = await reloaded.flush()
    assert.deepEqual(again, { sent: 0, failed: 0 })
    assert.equal(api.received.length, 1)
})

test('identical retries collapse on the idempotency key', () => {
    const api = new FakeApi()
    const storage = new MemoryStore()
    const s = new AnnotationSession(api, 'annie', [SUBJECTS[0]!, SUBJECTS[0]!], storage, 'test', () => 42)
    const first = s.submit(TAGS)
    const second = s.submit(TAGS) // same subject id, same timestamp
    assert.equal(submissionKey(first), submissionKey(second))
    assert.equal(s.pendingCount(), 1)
})

test('session complete refuses further submissions', () => {
    const api = new FakeApi()
    const s = new AnnotationSession(api, 'annie', [SUBJECTS[0]!], new MemoryStore(), 'test')
    s.submit(TAGS)
    assert.equal(s.currentSubject(), null)
    assert.throws(() => s.submit(TAGS), /no current subject/)
})

test('corrupted persisted state falls back to a fresh session', () => {
    const api = new FakeApi()
    const storage = new MemoryStore()
    storage.setItem('test:session:annie', '{not json')
    storage.setItem('test:outbox:annie', '"nope"')
    const s = session(api, storage)
    assert.equal(s.currentSubject()?.id, 's1')
    assert.equal(s.pendingCount(), 0)
})

test('sessions are isolated per annotator', () => {
    const api = new FakeApi()
    const storage = new MemoryStore()
    const annie = new AnnotationSession(api, 'annie', SUBJECTS, storage, 'test')
    annie.submit(TAGS)
    const bob = new AnnotationSession(api, 'bob', SUBJECTS, storage, 'test')
    assert.equal(bob.currentSubject()?.id, 's1')
    assert.equal(bob.pendingCount(), 0)
})
