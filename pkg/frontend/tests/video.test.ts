import { describe, expect, it } from "vitest";

import { frameAt, VideoScrubber } from "../src/video";
import type { FramesPayload } from "../src/types";

const FRAMES: FramesPayload = {
  video_id: "front_cam",
  rows: [
    [0, 1_000],
    [1, 1_033],
    [2, 1_066],
    [3, 1_100],
  ],
};

describe("frameAt", () => {
  it("null before the first frame", () => {
    expect(frameAt(FRAMES, 999)).toBeNull();
  });

  it("exact timestamps hit their frame", () => {
    expect(frameAt(FRAMES, 1_033)).toEqual([1, 1_033]);
  });

  it("between frames the earlier one shows", () => {
    expect(frameAt(FRAMES, 1_065)).toEqual([1, 1_033]);
  });

  it("after the last frame the last one sticks", () => {
    expect(frameAt(FRAMES, 99_999)).toEqual([3, 1_100]);
  });
});

describe("VideoScrubber", () => {
  it("maps the cursor to a playback offset in seconds", () => {
    const scrubber = new VideoScrubber("front_cam", 1_000, FRAMES);
    scrubber.seek(3_500);
    expect(scrubber.positionSeconds).toBe(2.5);
    expect(scrubber.reportedTime()).toBe(3_500);
    expect(scrubber.currentFrame()).toEqual([3, 1_100]);
  });

  it("works without a frame index", () => {
    const scrubber = new VideoScrubber("screen", 1_000);
    scrubber.seek(2_000);
    expect(scrubber.currentFrame()).toBeNull();
    expect(scrubber.positionSeconds).toBe(1.0);
  });
});
