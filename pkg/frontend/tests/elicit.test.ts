/** Confidence changes trigger exactly one elicitation preview each, and a
 * change made while a request is pending aborts the stale one. */

import { describe, expect, it } from "vitest";

import type { Client, ElicitRequest } from "../src/api.js";
import { ElicitPreview } from "../src/elicit.js";
import type { ElicitResponse } from "../src/types.js";

function fakeResponse(alpha: number): ElicitResponse {
  return {
    Sigma_beta_star: [
      [0.26, -1.88],
      [-1.88, 15.06],
    ],
    xi: 0.11,
    alpha,
    sd_beta0_star: 0.51,
    sd_beta1_star: 3.88,
    sign_flip_probability: alpha / 2,
  };
}

interface Call {
  request: ElicitRequest;
  signal: AbortSignal | undefined;
  resolve: (doc: ElicitResponse) => void;
}

function mockClient(): { client: Client; calls: Call[] } {
  const calls: Call[] = [];
  const client = {
    elicit(request: ElicitRequest, signal?: AbortSignal) {
      return new Promise<ElicitResponse>((resolve, reject) => {
        signal?.addEventListener("abort", () =>
          reject(new DOMException("aborted", "AbortError")),
        );
        calls.push({ request, signal, resolve });
      });
    },
  } as unknown as Client;
  return { client, calls };
}

const REQUEST: ElicitRequest = {
  session: "s",
  confidence: "likely",
  mu_y_star: 3,
  sigma_y_star: 1.5,
  sign: "positive",
};

describe("ElicitPreview", () => {
  it("sends exactly one request per change", async () => {
    const { client, calls } = mockClient();
    const preview = new ElicitPreview(client);
    const pending = preview.preview(REQUEST);
    expect(calls).toHaveLength(1);
    expect(preview.requestCount).toBe(1);
    calls[0]!.resolve(fakeResponse(0.34));
    const doc = await pending;
    expect(doc?.alpha).toBe(0.34);
    expect(calls).toHaveLength(1);
  });

  it("aborts the in-flight request when a newer change arrives", async () => {
    const { client, calls } = mockClient();
    const preview = new ElicitPreview(client);
    const first = preview.preview(REQUEST);
    const second = preview.preview({ ...REQUEST, confidence: "coin_flip" });
    expect(calls).toHaveLength(2);
    expect(calls[0]!.signal?.aborted).toBe(true);
    expect(calls[1]!.signal?.aborted).toBe(false);
    calls[1]!.resolve(fakeResponse(0.499));
    expect(await first).toBeNull();
    expect((await second)?.alpha).toBe(0.499);
    expect(preview.requestCount).toBe(2);
  });

  it("propagates non-abort failures", async () => {
    const client = {
      elicit: () => Promise.reject(new Error("boom")),
    } as unknown as Client;
    const preview = new ElicitPreview(client);
    await expect(preview.preview(REQUEST)).rejects.toThrow("boom");
  });
});
