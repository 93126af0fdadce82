export const MAIN_BASE = 'http://127.0.0.1:18791'
export const BLIND_BASE = 'http://127.0.0.1:18792'
export const SEEDED_GOLD_NAME = 'GM-CSF'
