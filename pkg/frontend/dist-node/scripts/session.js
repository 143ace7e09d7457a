/**
 * Scripted review session against a live service, driving the same session
 * layer the browser UI uses: approve the first proposed pattern and the
 * first record, export, and print a JSON report for the caller to verify.
 *
 * Usage: node dist-node/scripts/session.js http://127.0.0.1:PORT
 */
import { ReviewApi } from "../src/api.js";
import { patternsByStatus, ReviewSession } from "../src/state.js";
async function run(base) {
    const api = new ReviewApi(base);
    const session = new ReviewSession(api, "scripted-session");
    await session.refresh();
    const proposed = patternsByStatus(session.state, "proposed");
    if (proposed.length === 0) {
        throw new Error("no proposed patterns to review");
    }
    const pattern = proposed[0];
    if (!(await session.decidePattern(pattern.id, "APPROVE"))) {
        throw new Error(`pattern approval failed: ${session.state.banner}`);
    }
    const record = session.state.records[0];
    if (!record) {
        throw new Error("no records to review");
    }
    if (!(await session.decideRecord(record.id, "APPROVE"))) {
        throw new Error(`record approval failed: ${session.state.banner}`);
    }
    const summary = await session.runExport();
    if (!summary) {
        throw new Error(`export failed: ${session.state.banner}`);
    }
    // the service must reflect the decisions, not just the optimistic state
    await session.refresh();
    const patternAfter = session.state.patterns.find((p) => p.id === pattern.id);
    const recordAfter = session.state.records.find((r) => r.id === record.id);
    if (patternAfter?.status !== "approved" || recordAfter?.status !== "approved") {
        throw new Error("service state does not reflect the submitted decisions");
    }
    process.stdout.write(JSON.stringify({
        approved_pattern: pattern.id,
        approved_record: record.id,
        record_name: record.official_name,
        record_style: record.style_name,
        summary,
    }) + "\n");
}
const base = process.argv[2];
if (!base) {
    process.stderr.write("usage: session.js <service-base-url>\n");
    process.exit(2);
}
run(base).catch((err) => {
    process.stderr.write(`${String(err)}\n`);
    process.exit(1);
});
