/** Thin typed client for the tagmatch HTTP service.
 *
 * The UI never computes scores locally; every number shown comes from these
 * endpoints.
 */

import type {
    AgreementPayload,
    Annotation,
    CatalogInfo,
    MatchPayload,
    SchemaPayload,
    ServiceError,
    SubjectAnnotationsPayload,
    TagAssignment,
} from './types.js'

export class ApiError extends Error {
    readonly status: number
    readonly code: string
    readonly detail: Record<string, unknown>

    constructor(status: number, body: ServiceError | null) {
        super(body?.message ?? `HTTP ${status}`)
        this.status = status
        this.code = body?.code ?? 'http_error'
        this.detail = body?.detail ?? {}
    }
}

async function parseError(response: Response): Promise<never> {
    let body: ServiceError | null = null
    try {
        body = (await response.json()) as ServiceError
    } catch {
        body = null
    }
    throw new ApiError(response.status, body)
}

export class ApiClient {
    constructor(private readonly baseUrl: string, private readonly fetchImpl: typeof fetch = fetch) {}

    private async get<T>(path: string): Promise<T> {
        const response = await this.fetchImpl(`${this.baseUrl}${path}`)
        if (!response.ok) await parseError(response)
        return (await response.json()) as T
    }

    private async post<T>(path: string, body: unknown): Promise<T> {
        const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
            method: 'POST',
            headers: { 'Content-Type': 'application/json' },
            body: JSON.stringify(body),
        })
        if (!response.ok) await parseError(response)
        return (await response.json()) as T
    }

    health(): Promise<{ status: string }> {
        return this.get('/healthz')
    }

    schema(): Promise<SchemaPayload> {
        return this.get('/schema')
    }

    catalogs(): Promise<CatalogInfo[]> {
        return this.get('/catalogs')
    }

    match(tags: TagAssignment, catalogId: string, k: number): Promise<MatchPayload> {
        return this.post('/match', { tags, catalog_id: catalogId, k })
    }

    submitAnnotation(annotation: Annotation): Promise<{ status: string }> {
        return this.post('/annotations', annotation)
    }

    subjectAnnotations(subjectId: string): Promise<SubjectAnnotationsPayload> {
        return this.get(`/subjects/${encodeURIComponent(subjectId)}/annotations`)
    }

    agreement(catalogId: string, k: number): Promise<AgreementPayload> {
        return this.get(`/agreement?catalog_id=${encodeURIComponent(catalogId)}&k=${k}`)
    }
}
