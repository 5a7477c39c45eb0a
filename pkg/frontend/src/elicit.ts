/** Elicitation preview controller.
 *
 * Each control change triggers exactly one preview request; a change that
 * arrives while one is in flight aborts it first, so rapid slider movement
 * never stacks requests. */

import type { Client, ElicitRequest } from "./api.js";
import type { ElicitResponse } from "./types.js";

export class ElicitPreview {
  requestCount = 0;
  private inFlight: AbortController | null = null;

  constructor(private client: Client) {}

  async preview(request: ElicitRequest): Promise<ElicitResponse | null> {
    if (this.inFlight) {
      this.inFlight.abort();
    }
    const controller = new AbortController();
    this.inFlight = controller;
    this.requestCount += 1;
    try {
      return await this.client.elicit(request, controller.signal);
    } catch (err) {
      if (err instanceof DOMException && err.name === "AbortError") {
        return null;
      }
      throw err;
    } finally {
      if (this.inFlight === controller) {
        this.inFlight = null;
      }
    }
  }
}
