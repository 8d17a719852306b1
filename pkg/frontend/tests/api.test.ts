import { describe, expect, it } from "vitest";

import { ApiRequestError, LabelServiceClient } from "../src/api.js";

function recordingFetch(response: Response) {
  const calls: { url: string; init?: RequestInit }[] = [];
  const impl = async (url: string, init?: RequestInit) => {
    calls.push({ url, init });
    return response;
  };
  return { calls, impl };
}

describe("LabelServiceClient", () => {
  it("prefixes the base url and api root", async () => {
    const { calls, impl } = recordingFetch(
      new Response("[]", { status: 200 }),
    );
    const client = new LabelServiceClient("http://host:9", impl);
    await client.listTrials();
    expect(calls[0].url).toBe("http://host:9/api/v1/trials");
  });

  it("serializes label writes the way the service expects", async () => {
    const { calls, impl } = recordingFetch(
      new Response('{"version": 3}', { status: 200 }),
    );
    const client = new LabelServiceClient("", impl);
    const result = await client.putLabel("T__a", 4, "02000", 2);
    expect(result.version).toBe(3);
    expect(calls[0].url).toBe("/api/v1/sessions/T__a/labels");
    expect(calls[0].init?.method).toBe("PUT");
    expect(JSON.parse(String(calls[0].init?.body))).toEqual({
      frame: 4,
      state: "02000",
      base_version: 2,
    });
  });

  it("maps error payloads onto ApiRequestError", async () => {
    const { impl } = recordingFetch(
      new Response(
        JSON.stringify({
          detail: { error: "VersionConflict", message: "stale", version: 7 },
        }),
        { status: 409 },
      ),
    );
    const client = new LabelServiceClient("", impl);
    const err = await client
      .putLabel("T__a", 0, "00000", 0)
      .then(() => null)
      .catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ApiRequestError);
    const apiErr = err as ApiRequestError;
    expect(apiErr.status).toBe(409);
    expect(apiErr.code).toBe("VersionConflict");
    expect(apiErr.version).toBe(7);
  });

  it("copes with non-JSON error bodies", async () => {
    const { impl } = recordingFetch(
      new Response("boom", { status: 502, statusText: "Bad Gateway" }),
    );
    const client = new LabelServiceClient("", impl);
    const err = (await client
      .listTrials()
      .catch((e: unknown) => e)) as ApiRequestError;
    expect(err.code).toBe("HTTP502");
  });

  it("builds frame urls", () => {
    const client = new LabelServiceClient("http://h");
    expect(client.frameUrl("Suturing_S01_T01", 3)).toBe(
      "http://h/api/v1/trials/Suturing_S01_T01/frames/3",
    );
  });
});
