import { describe, expect, it } from "vitest";

import { DwellTracker } from "../src/dwell.js";

function manualClock(): { now(): number; tick(ms: number): void } {
  let t = 0;
  return {
    now: () => t,
    tick: (ms: number) => {
      t += ms;
    },
  };
}

describe("DwellTracker", () => {
  it("measures the hidden-to-visible span in seconds", async () => {
    const clock = manualClock();
    const tracker = new DwellTracker(clock);
    const measured = tracker.begin();
    tracker.onVisibilityChange(true);
    clock.tick(3500);
    tracker.onVisibilityChange(false);
    await expect(measured).resolves.toBeCloseTo(3.5, 9);
  });

  it("ignores visibility churn when not armed", () => {
    const tracker = new DwellTracker(manualClock());
    tracker.onVisibilityChange(true);
    tracker.onVisibilityChange(false);
    expect(tracker.armed).toBe(false);
  });

  it("ignores a visible event before any hidden event", async () => {
    const clock = manualClock();
    const tracker = new DwellTracker(clock);
    const measured = tracker.begin();
    tracker.onVisibilityChange(false); // already visible; nothing to measure yet
    expect(tracker.armed).toBe(true);
    tracker.onVisibilityChange(true);
    clock.tick(1000);
    tracker.onVisibilityChange(false);
    await expect(measured).resolves.toBe(1);
  });

  it("cancel resolves an armed measurement with zero", async () => {
    const tracker = new DwellTracker(manualClock());
    const measured = tracker.begin();
    tracker.cancel();
    await expect(measured).resolves.toBe(0);
    expect(tracker.armed).toBe(false);
  });

  it("only the first hidden timestamp counts", async () => {
    const clock = manualClock();
    const tracker = new DwellTracker(clock);
    const measured = tracker.begin();
    tracker.onVisibilityChange(true);
    clock.tick(2000);
    tracker.onVisibilityChange(true); // duplicate hidden event
    clock.tick(1000);
    tracker.onVisibilityChange(false);
    await expect(measured).resolves.toBe(3);
  });
});
