import assert from "node:assert/strict";
import { test } from "node:test";

import {
  bannerHtml,
  contextHtml,
  escapeHtml,
  excerptHtml,
  exportSummaryHtml,
  matchBadge,
  patternCardHtml,
  recordCardHtml,
} from "../src/render.js";
import type { ExcerptPayload, PatternSample, RecordCard } from "../src/types.js";

const sample: PatternSample = {
  doc_id: "t1",
  start: 0,
  end: 15,
  text: "陳瑜字仲庸雷州人廣西中書省都事",
  spans: [
    { start: 0, end: 2, type: "NAME" },
    { start: 5, end: 7, type: "ADDRESS" },
    { start: 8, end: 10, type: "ADDRESS" },
    { start: 10, end: 15, type: "OFFICE" },
  ],
};

function stripTags(html: string): string {
  return html.replace(/<[^>]+>/g, "");
}

test("excerpt text content byte-matches the payload", () => {
  const html = excerptHtml(sample);
  assert.equal(stripTags(html), sample.text);
});

test("excerpt highlights exactly the span offsets", () => {
  const html = excerptHtml(sample);
  assert.match(html, /<mark class="span span-name" title="NAME">陳瑜<\/mark>/);
  assert.match(html, /<mark class="span span-office" title="OFFICE">中書省都事<\/mark>/);
  // the unlabeled style-name stretch stays outside any mark
  assert.match(html, />字仲庸<mark/);
});

test("escapeHtml handles markup characters", () => {
  assert.equal(escapeHtml(`<b a="c">&`), "&lt;b a=&quot;c&quot;&gt;&amp;");
});

test("context rendering uses the API highlight offsets", () => {
  const payload: ExcerptPayload = {
    id: "t1:0:P5:Yuan",
    doc_id: "t1",
    status: "proposed",
    evidence: "陳瑜字仲庸",
    context: "祀之陳瑜字仲庸雷州",
    highlight: { start: 2, end: 4 },
  };
  const html = contextHtml(payload);
  assert.equal(stripTags(html), payload.context);
  assert.match(html, /<mark class="span span-name">陳瑜<\/mark>/);
});

test("context falls back to evidence without offsets", () => {
  const payload: ExcerptPayload = {
    id: "x",
    doc_id: "d",
    status: "proposed",
    evidence: "甲乙字丙丁",
    context: null,
    highlight: null,
  };
  assert.equal(stripTags(contextHtml(payload)), payload.evidence);
});

test("table 1 badge spells out the row marks", () => {
  assert.equal(matchBadge("TABLE1", 2), "dynasty ○ name ○ style ×");
  assert.equal(matchBadge("TABLE1", 7), "dynasty ○/× name × style ×");
  assert.equal(matchBadge("TABLE2", 3), "name × style ○");
});

test("record card shows the badge from the API classification", () => {
  const record: RecordCard = {
    id: "t1:0:P5:Yuan",
    dynasty: "Yuan",
    official_name: "陳瑜",
    style_name: "仲庸",
    doc_id: "t1",
    name_start: 0,
    source: "P5",
    status: "proposed",
    match_scheme: "TABLE1",
    match_type: 2,
  };
  const html = recordCardHtml(record);
  assert.match(html, /TABLE1 type 2: dynasty ○ name ○ style ×/);
  assert.match(html, /data-record-id="t1:0:P5:Yuan"/);
});

test("pattern card renders at most five samples", () => {
  const many = Array.from({ length: 8 }, () => sample);
  const html = patternCardHtml({
    id: "NAME-ADDRESS-ADDRESS-OFFICE",
    sequence: "NAME-ADDRESS-ADDRESS-OFFICE",
    support: 12,
    status: "proposed",
    samples: many,
  });
  assert.equal((html.match(/<li>/g) ?? []).length, 5);
  assert.match(html, /support 12/);
});

test("banner and export summary", () => {
  assert.equal(bannerHtml(null), "");
  assert.match(bannerHtml("boom"), /class="banner error"/);
  assert.match(
    exportSummaryHtml({
      records_merged: 1,
      patterns_approved: 2,
      entries_file: "e.tsv",
      persons_file: "p.tsv",
      patterns_file: "pat.tsv",
    }),
    /1 person record merged/,
  );
});
