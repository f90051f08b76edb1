import { describe, expect, it, vi } from "vitest";
import type * as THREE from "three";

import { parseOff } from "../src/off";
import { geometryFromOff, ModelViewer, type RenderSurface } from "../src/viewer";

const CUBE_OFF = `OFF
8 6 12
-0.5 -0.5 -0.5
-0.5 -0.5 0.5
-0.5 0.5 -0.5
-0.5 0.5 0.5
0.5 -0.5 -0.5
0.5 -0.5 0.5
0.5 0.5 -0.5
0.5 0.5 0.5
4 0 1 3 2
4 4 6 7 5
4 0 4 5 1
4 2 3 7 6
4 0 2 6 4
4 1 5 7 3
`;

class RecordingSurface implements RenderSurface {
  displayed: Array<{ id: string; geometry: THREE.BufferGeometry }> = [];
  placeholders: Array<{ id: string; reason: string }> = [];
  display(geometry: THREE.BufferGeometry, id: string): void {
    this.displayed.push({ id, geometry });
  }
  placeholder(id: string, reason: string): void {
    this.placeholders.push({ id, reason });
  }
  dispose(): void {}
}

describe("geometryFromOff", () => {
  it("builds an 8-vertex indexed geometry from the cube", () => {
    const geometry = geometryFromOff(parseOff(CUBE_OFF));
    expect(geometry.getAttribute("position").count).toBe(8);
    expect(geometry.getIndex()?.count).toBe(36);
    expect(geometry.boundingSphere?.radius).toBeCloseTo(Math.sqrt(3) / 2, 6);
  });
});

describe("ModelViewer", () => {
  it("renders a fetched model", async () => {
    const surface = new RecordingSurface();
    const viewer = new ModelViewer(surface, async () => CUBE_OFF);
    await expect(viewer.show("cube")).resolves.toBe("rendered");
    expect(surface.displayed).toHaveLength(1);
    expect(surface.displayed[0]!.id).toBe("cube");
  });

  it("shows a placeholder when the fetch fails", async () => {
    const surface = new RecordingSurface();
    const viewer = new ModelViewer(surface, async () => {
      throw new Error("mesh fetch failed: 404");
    });
    await expect(viewer.show("ghost")).resolves.toBe("placeholder");
    expect(surface.placeholders[0]).toMatchObject({ id: "ghost" });
  });

  it("shows a placeholder on unparseable OFF text", async () => {
    const surface = new RecordingSurface();
    const viewer = new ModelViewer(surface, async () => "not an OFF file");
    await expect(viewer.show("junk")).resolves.toBe("placeholder");
  });

  it("uses the shared fetch per id (cache contract lives in ApiClient)", async () => {
    const fetchMesh = vi.fn(async () => CUBE_OFF);
    const surface = new RecordingSurface();
    const viewer = new ModelViewer(surface, fetchMesh);
    await viewer.show("m1");
    await viewer.show("m1");
    expect(fetchMesh).toHaveBeenCalledTimes(2); // dedup happens in ApiClient
    expect(surface.displayed).toHaveLength(2);
  });
});
