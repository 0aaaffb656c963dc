/** Latest-wins request scheduling: at most one diagram request in
 * flight; while one is pending the newest state replaces any queued
 * older one, and stale responses are dropped by sequence number. */

export class DiagramScheduler<S, R> {
  private seq = 0;
  private applied = 0;
  private inFlight = false;
  private queued: S | null = null;
  private waiters: Array<() => void> = [];

  constructor(
    private send: (state: S) => Promise<R>,
    private apply: (result: R, state: S) => void,
    private onError: (error: unknown, state: S) => void = () => {}
  ) {}

  get busy(): boolean {
    return this.inFlight;
  }

  schedule(state: S): void {
    if (this.inFlight) {
      this.queued = state; // newer state supersedes anything queued
      return;
    }
    void this.dispatch(state);
  }

  /** Resolves once no request is running and nothing is queued. */
  idle(): Promise<void> {
    if (!this.inFlight && this.queued === null) return Promise.resolve();
    return new Promise((resolve) => this.waiters.push(resolve));
  }

  private async dispatch(state: S): Promise<void> {
    this.inFlight = true;
    const ticket = ++this.seq;
    try {
      const result = await this.send(state);
      if (ticket > this.applied && this.queued === null) {
        this.applied = ticket;
        this.apply(result, state);
      }
    } catch (error) {
      if (this.queued === null) this.onError(error, state);
    } finally {
      this.inFlight = false;
      const next = this.queued;
      this.queued = null;
      if (next !== null) {
        void this.dispatch(next);
      } else {
        for (const resolve of this.waiters.splice(0)) resolve();
      }
    }
  }
}
