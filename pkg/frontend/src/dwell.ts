/**
 * Dwell-time measurement for click feedback.
 *
 * The profile's Visit_Duration has no natural source in a plain web page, so
 * dwell is approximated by the span the tab spends hidden between clicking a
 * result (which opens in a new tab, hiding this one) and returning to it.
 * If the tab never becomes hidden — e.g. the user middle-clicked — dwell is
 * reported as 0 rather than guessed.
 */

export interface DwellClock {
  now(): number;
}

export class DwellTracker {
  private hiddenAt: number | null = null;
  private settle: ((seconds: number) => void) | null = null;

  constructor(private readonly clock: DwellClock = { now: () => Date.now() }) {}

  /** Arms the tracker; resolves on the first hidden→visible round trip. */
  begin(): Promise<number> {
    this.hiddenAt = null;
    return new Promise((resolve) => {
      this.settle = resolve;
    });
  }

  onVisibilityChange(hidden: boolean): void {
    if (this.settle === null) return;
    if (hidden) {
      if (this.hiddenAt === null) this.hiddenAt = this.clock.now();
      return;
    }
    if (this.hiddenAt === null) return;
    const seconds = Math.max(0, (this.clock.now() - this.hiddenAt) / 1000);
    const settle = this.settle;
    this.settle = null;
    this.hiddenAt = null;
    settle(seconds);
  }

  /** Resolves an armed measurement immediately (user clicked again, etc.). */
  cancel(): void {
    if (this.settle === null) return;
    const settle = this.settle;
    this.settle = null;
    this.hiddenAt = null;
    settle(0);
  }

  get armed(): boolean {
    return this.settle !== null;
  }
}
