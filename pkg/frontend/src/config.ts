/** UI configuration: one JSON file next to index.html. */

export interface SubjectRef {
    id: string
    image_url: string
}

export interface UiConfig {
    service_base_url: string
    catalog_ids: string[]
    image_base_url: string
    subjects: SubjectRef[]
    default_k: number
}

export function parseConfig(raw: unknown): UiConfig {
    if (typeof raw !== 'object' || raw === null) {
        throw new Error('config must be a JSON object')
    }
    const record = raw as Record<string, unknown>
    const serviceBase = record['service_base_url']
    if (typeof serviceBase !== 'string' || serviceBase.length === 0) {
        throw new Error('config.service_base_url must be a non-empty string')
    }
    const catalogIds = record['catalog_ids']
    if (!Array.isArray(catalogIds) || catalogIds.length === 0 || !catalogIds.every(c => typeof c === 'string')) {
        throw new Error('config.catalog_ids must be a non-empty string array')
    }
    const subjectsRaw = record['subjects']
    if (!Array.isArray(subjectsRaw)) {
        throw new Error('config.subjects must be an array')
    }
    const subjects: SubjectRef[] = subjectsRaw.map((entry, index) => {
        const subject = entry as Record<string, unknown>
        if (typeof subject['id'] !== 'string') {
            throw new Error(`config.subjects[${index}].id must be a string`)
        }
        return {
            id: subject['id'],
            image_url: typeof subject['image_url'] === 'string' ? subject['image_url'] : '',
        }
    })
    const defaultK = record['default_k']
    return {
        service_base_url: serviceBase.replace(/\/+$/, ''),
        catalog_ids: catalogIds as string[],
        image_base_url: typeof record['image_base_url'] === 'string' ? record['image_base_url'] : '',
        subjects,
        default_k: typeof defaultK === 'number' && defaultK >= 1 ? Math.floor(defaultK) : 5,
    }
}

export async function loadConfig(url: string): Promise<UiConfig> {
    const response = await fetch(url)
    if (!response.ok) {
        throw new Error(`failed to load ${url}: HTTP ${response.status}`)
    }
    return parseConfig(await response.json())
}
