import { describe, expect, it } from "vitest";

import { extractMetadata } from "../src/metadata.js";
import { ValidationError } from "../src/schema.js";

describe("extractMetadata", () => {
  it("packs the five fields in fixed order", () => {
    expect(
      extractMetadata({ views: 10, likes: 2, dislikes: 1, comments: 0, duration_s: 300 }),
    ).toEqual([10, 2, 1, 0, 300]);
  });

  it("ignores JSON key order", () => {
    const scrambled = JSON.parse(
      '{"duration_s": 300, "comments": 0, "views": 10, "dislikes": 1, "likes": 2}',
    );
    expect(extractMetadata(scrambled)).toEqual([10, 2, 1, 0, 300]);
  });

  it("handles all-zero engagement", () => {
    expect(
      extractMetadata({ views: 0, likes: 0, dislikes: 0, comments: 0, duration_s: 45 }),
    ).toEqual([0, 0, 0, 0, 45]);
  });

  it("rejects a missing field, naming it", () => {
    expect(() =>
      extractMetadata({ id: "v9", views: 1, likes: 0, dislikes: 0, duration_s: 10 }),
    ).toThrowError(/v9.*'comments'/);
    expect(() => extractMetadata({})).toThrowError(ValidationError);
  });
});
