import { ApiError } from "./api.js";
export function initialState() {
    return {
        patterns: [],
        records: [],
        filters: { source: null, matchType: null },
        banner: null,
        exportSummary: null,
    };
}
/** Patterns sorted by support, highest first; ties by id for stability. */
export function patternsSorted(state) {
    return [...state.patterns].sort((a, b) => b.support - a.support || a.id.localeCompare(b.id));
}
export function patternsByStatus(state, status) {
    return patternsSorted(state).filter((p) => p.status === status);
}
/** Record queue after the source / match-type filters. */
export function visibleRecords(state) {
    return state.records.filter((r) => (state.filters.source === null || r.source === state.filters.source) &&
        (state.filters.matchType === null || r.match_type === state.filters.matchType));
}
/** Drives the review flow; every mutation round-trips through the API, with
 * optimistic local status flips that are rolled back on failure. */
export class ReviewSession {
    api;
    reviewer;
    state = initialState();
    constructor(api, reviewer = "reviewer") {
        this.api = api;
        this.reviewer = reviewer;
    }
    async refresh() {
        this.state.patterns = await this.api.listPatterns();
        this.state.records = await this.api.listRecords();
        this.state.banner = null;
    }
    fail(context, err) {
        const detail = err instanceof ApiError ? err.message : String(err);
        this.state.banner = `${context}: ${detail}`;
    }
    async decidePattern(id, verdict) {
        const target = this.state.patterns.find((p) => p.id === id);
        if (!target) {
            this.state.banner = `unknown pattern ${id}`;
            return false;
        }
        const previous = target.status;
        target.status = verdict === "APPROVE" ? "approved" : "rejected";
        try {
            await this.api.decidePattern(id, verdict, this.reviewer);
            return true;
        }
        catch (err) {
            target.status = previous;
            this.fail(`pattern decision for ${id} failed`, err);
            return false;
        }
    }
    async decideRecord(id, verdict) {
        const target = this.state.records.find((r) => r.id === id);
        if (!target) {
            this.state.banner = `unknown record ${id}`;
            return false;
        }
        const previous = target.status;
        target.status = verdict === "APPROVE" ? "approved" : "rejected";
        try {
            await this.api.decideRecord(id, verdict, this.reviewer);
            return true;
        }
        catch (err) {
            target.status = previous;
            this.fail(`record decision for ${id} failed`, err);
            return false;
        }
    }
    async runExport() {
        try {
            this.state.exportSummary = await this.api.exportApproved();
            return this.state.exportSummary;
        }
        catch (err) {
            this.fail("export failed", err);
            return null;
        }
    }
    setSourceFilter(source) {
        this.state.filters.source = source;
    }
    setMatchTypeFilter(matchType) {
        this.state.filters.matchType = matchType;
    }
}
