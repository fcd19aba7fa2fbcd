import { describe, expect, it } from "vitest";

import {
  GROUPS,
  ValidationError,
  parseVideosJsonl,
  recordToJson,
  validateRecord,
} from "../src/schema.js";

describe("group table", () => {
  it("matches the pipeline's dimensions and scopes", () => {
    expect(GROUPS).toEqual({
      bert_title_desc_tags: { dim: 768, scope: "video" },
      bert_captions: { dim: 768, scope: "video" },
      nela: { dim: 260, scope: "video" },
      numeric_meta: { dim: 5, scope: "video" },
      ivectors: { dim: 600, scope: "episode" },
      opensmile_is09: { dim: 385, scope: "episode" },
    });
  });
});

describe("validateRecord", () => {
  it("rejects wrong dimensions with group and dims in the message", () => {
    expect(() =>
      validateRecord({ group: "ivectors", video_id: "v", episode_index: 0, vector: new Array(599).fill(0) }),
    ).toThrowError(/'ivectors' expects dimension 600, got 599/);
  });

  it("rejects non-finite values", () => {
    const vector = new Array(5).fill(0);
    vector[2] = Number.NaN;
    expect(() =>
      validateRecord({ group: "numeric_meta", video_id: "v", vector }),
    ).toThrowError(ValidationError);
  });

  it("enforces episode_index presence by scope", () => {
    expect(() =>
      validateRecord({ group: "opensmile_is09", video_id: "v", vector: new Array(385).fill(0) }),
    ).toThrowError(/episode-scoped/);
    expect(() =>
      validateRecord({ group: "nela", video_id: "v", episode_index: 1, vector: new Array(260).fill(0) }),
    ).toThrowError(/video-scoped/);
  });

  it("accepts records matching the table", () => {
    validateRecord({ group: "numeric_meta", video_id: "v", vector: [1, 2, 3, 4, 5] });
    validateRecord({
      group: "opensmile_is09",
      video_id: "v",
      episode_index: 4,
      vector: new Array(385).fill(0.5),
    });
  });
});

describe("recordToJson", () => {
  it("emits keys in a fixed order and round-trips", () => {
    const line = recordToJson({
      group: "numeric_meta",
      video_id: "v1",
      vector: [1, 2.5, 0, 4, 5],
    });
    expect(line.startsWith('{"group":"numeric_meta","video_id":"v1","vector":')).toBe(true);
    expect(JSON.parse(line)).toEqual({
      group: "numeric_meta",
      video_id: "v1",
      vector: [1, 2.5, 0, 4, 5],
    });
  });

  it("includes episode_index between video_id and vector when present", () => {
    const line = recordToJson({
      group: "ivectors",
      video_id: "v1",
      episode_index: 2,
      vector: new Array(600).fill(0),
    });
    expect(line).toContain('"video_id":"v1","episode_index":2,"vector"');
  });
});

describe("parseVideosJsonl", () => {
  it("parses the pipeline manifest schema", () => {
    const text =
      JSON.stringify({
        id: "v1", channel_id: "c1", title: "t", description: "d", tags: ["x"],
        views: 1, likes: 2, dislikes: 3, comments: 4, duration_s: 5,
      }) + "\n";
    const videos = parseVideosJsonl(text);
    expect(videos).toHaveLength(1);
    expect(videos[0].tags).toEqual(["x"]);
    expect(videos[0].duration_s).toBe(5);
  });

  it("reports missing fields with the line number", () => {
    expect(() => parseVideosJsonl('{"id": "v1"}')).toThrowError(/line 1: missing field/);
  });
});
