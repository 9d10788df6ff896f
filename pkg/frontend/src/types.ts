/** Wire types for the tagmatch service. */

export interface GateRef {
    attribute: string
    option: number
}

export interface SchemaAttribute {
    id: string
    region: string
    display_name: string
    options: string[]
    weight: string
    kind: 'continuous' | 'discrete'
    gated_by: GateRef | null
}

export interface SchemaPayload {
    name: string
    version: string
    attributes: SchemaAttribute[]
}

export type TagAssignment = Record<string, number>

export interface BreakdownEntry {
    raw: string
    weighted: string
    applicable: boolean
}

export interface MatchEntry {
    asset_id: string
    score: string
    rank: number
    breakdown: {
        total: string
        per_attribute: Record<string, BreakdownEntry>
    }
}

export interface MatchPayload {
    catalog_id: string
    k: number
    query: TagAssignment
    matches: MatchEntry[]
}

export interface Annotation {
    annotator_id: string
    subject_id: string
    subject_kind: 'human' | 'asset'
    tags: TagAssignment
    created_at: number
}

export interface SubjectAnnotationsPayload {
    subject_id: string
    annotations: Annotation[]
}

export interface AgreementRow {
    subjects_total: number
    subjects_agreeing: number
    rate: string
    per_attribute_rates?: Record<string, string>
}

export interface AgreementPayload {
    catalog_id: string
    k_max: number
    policy: { level: string; quorum: number; topk_rule: string }
    tag_level: AgreementRow
    topk: Array<AgreementRow & { k: number }>
}

export interface CatalogInfo {
    catalog_id: string
    assets: number
}

export interface ServiceError {
    code: string
    message: string
    detail: Record<string, unknown>
}
