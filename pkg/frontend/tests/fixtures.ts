/** Test fixtures: a local copy of the built-in hairstyle schema payload. */

import type { MatchPayload, SchemaPayload } from '../src/types.js'

export const SCHEMA: SchemaPayload = {
    name: 'hairstyle',
    version: '1',
    attributes: [
        { id: 'top_front_length', region: 'top_front', display_name: 'Top and front / Length', options: ['bald', 'buzz', 'short', 'medium', 'long', 'very_long'], weight: '2.25', kind: 'continuous', gated_by: null },
        { id: 'top_front_direction', region: 'top_front', display_name: 'Top and front / Direction', options: ['down', 'up', 'back', 'middle_part', 'left_part', 'right_part', 'swept_left', 'swept_right'], weight: '2', kind: 'discrete', gated_by: null },
        { id: 'top_front_curly_level', region: 'top_front', display_name: 'Top and front / Curly level', options: ['straight', 'wavy', 'curly', 'coily'], weight: '1', kind: 'continuous', gated_by: null },
        { id: 'side_length', region: 'side', display_name: 'On the side / Length', options: ['shaved', 'short', 'medium', 'long', 'very_long'], weight: '2.25', kind: 'continuous', gated_by: null },
        { id: 'side_curly_level', region: 'side', display_name: 'On the side / Curly level', options: ['straight', 'wavy', 'curly', 'coily'], weight: '1', kind: 'continuous', gated_by: null },
        { id: 'braid_yes_no', region: 'braid', display_name: 'Braid / Yes No', options: ['no', 'yes'], weight: '5', kind: 'discrete', gated_by: null },
        { id: 'braid_count', region: 'braid', display_name: 'Braid / Count', options: ['one', 'two', 'three', 'four_or_more'], weight: '2', kind: 'discrete', gated_by: { attribute: 'braid_yes_no', option: 1 } },
        { id: 'braid_position', region: 'braid', display_name: 'Braid / Position', options: ['back', 'sides', 'top'], weight: '1', kind: 'discrete', gated_by: { attribute: 'braid_yes_no', option: 1 } },
        { id: 'braid_type', region: 'braid', display_name: 'Braid / Type', options: ['classic', 'french', 'fishtail', 'dutch', 'crown'], weight: '1', kind: 'discrete', gated_by: { attribute: 'braid_yes_no', option: 1 } },
    ],
}

export const UNGATED_IDS = [
    'top_front_length',
    'top_front_direction',
    'top_front_curly_level',
    'side_length',
    'side_curly_level',
    'braid_yes_no',
]

export const GATED_IDS = ['braid_count', 'braid_position', 'braid_type']

export function matchPayload(catalogId: string, assetIds: string[]): MatchPayload {
    return {
        catalog_id: catalogId,
        k: assetIds.length,
        query: {},
        matches: assetIds.map((assetId, index) => ({
            asset_id: assetId,
            score: String(index),
            rank: index + 1,
            breakdown: { total: String(index), per_attribute: {} },
        })),
    }
}
