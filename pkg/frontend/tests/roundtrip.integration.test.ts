/** Live round-trip against a running `shape3d serve` instance.
 *
 * Skipped unless SHAPE3D_SERVICE (base URL) is set; SHAPE3D_INDEX must point
 * at the served index file so the reference CLI can be invoked with
 * identical parameters:
 *
 *   SHAPE3D_INDEX=index.json shape3d serve --port 8471 &
 *   SHAPE3D_SERVICE=http://127.0.0.1:8471 SHAPE3D_INDEX=index.json npm test
 */

import { execFileSync } from "node:child_process";
import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api";
import { SearchStore } from "../src/state";

const base = process.env.SHAPE3D_SERVICE;

describe.skipIf(!base)("live UI round-trip", () => {
  it("submitting with defaults shows the same top-12 as the CLI", async () => {
    const api = new ApiClient(base!);
    const store = new SearchStore(api);
    await store.loadCatalog();
    expect(store.state.models.length).toBeGreaterThan(0);

    const queryId = store.state.models[0]!.id;
    store.select(queryId);
    await store.submit();
    expect(store.state.error).toBeNull();
    expect(store.state.results.length).toBeGreaterThan(0);

    const cliOut = execFileSync(
      "shape3d",
      ["query", "--id", queryId, "--k", "12", "--json"],
      { encoding: "utf-8" },
    ).trim();
    const cli = JSON.parse(cliOut) as {
      results: Array<{ model_id: string; distance: number }>;
    };
    expect(store.state.results.map((r) => r.model_id)).toEqual(
      cli.results.map((r) => r.model_id),
    );
    expect(store.state.results.map((r) => r.distance)).toEqual(
      cli.results.map((r) => r.distance),
    );
  });

  it("clicking a result re-queries with that model", async () => {
    const api = new ApiClient(base!);
    const store = new SearchStore(api);
    await store.loadCatalog();
    store.select(store.state.models[0]!.id);
    await store.submit();

    const clicked = store.state.results.find(
      (r) => r.model_id !== store.state.selectedId,
    )!;
    await store.clickResult(clicked.model_id);
    expect(store.state.selectedId).toBe(clicked.model_id);
    expect(store.state.resultsFor?.modelId).toBe(clicked.model_id);
    expect(store.state.results[0]!.model_id).toBe(clicked.model_id);
    expect(store.state.results[0]!.distance).toBeLessThan(1e-9);
  });

  it("renders mesh text fetched from the live service", async () => {
    const api = new ApiClient(base!);
    const { parseOff } = await import("../src/off");
    const store = new SearchStore(api);
    await store.loadCatalog();
    const text = await api.fetchMeshText(store.state.models[0]!.id);
    expect(parseOff(text).vertexCount).toBeGreaterThan(3);
  });
});
