export class ApiError extends Error {
    status;
    constructor(status, message) {
        super(message);
        this.status = status;
    }
}
async function request(url, init) {
    let response;
    try {
        response = await fetch(url, init);
    }
    catch (err) {
        throw new ApiError(0, `network failure: ${String(err)}`);
    }
    const body = await response.text();
    if (!response.ok) {
        let detail = body;
        try {
            detail = JSON.parse(body).error ?? body;
        }
        catch {
            // non-JSON error body, keep raw text
        }
        throw new ApiError(response.status, detail);
    }
    return JSON.parse(body);
}
/** Thin typed client over the review API; all state changes go through
 * decision and export endpoints, never anywhere else. */
export class ReviewApi {
    base;
    constructor(base) {
        this.base = base;
    }
    listPatterns() {
        return request(`${this.base}/api/patterns`);
    }
    listRecords(status) {
        const suffix = status ? `?status=${encodeURIComponent(status)}` : "";
        return request(`${this.base}/api/records${suffix}`);
    }
    getExcerpt(recordId) {
        return request(`${this.base}/api/excerpts/${encodeURIComponent(recordId)}`);
    }
    decidePattern(id, verdict, reviewer) {
        return request(`${this.base}/api/patterns/${encodeURIComponent(id)}/decision`, {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify({ verdict, reviewer }),
        });
    }
    decideRecord(id, verdict, reviewer) {
        return request(`${this.base}/api/records/${encodeURIComponent(id)}/decision`, {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify({ verdict, reviewer }),
        });
    }
    exportApproved() {
        return request(`${this.base}/api/export`, { method: "POST" });
    }
}
