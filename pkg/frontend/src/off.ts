/** Client-side ASCII OFF parser. Polygon faces are fan-triangulated around
 * their first vertex, matching what the service does on the indexing side. */

export interface ParsedOff {
  vertexCount: number;
  faceCount: number;
  /** xyz triples, length 3 * vertexCount */
  positions: Float32Array;
  /** triangle vertex indices, length 3 * faceCount */
  triangles: Uint32Array;
}

export function parseOff(text: string): ParsedOff {
  const lines: string[] = [];
  for (const raw of text.split(/\r?\n/)) {
    const line = raw.trim();
    if (line.length > 0 && !line.startsWith("#")) lines.push(line);
  }
  let pos = 0;
  const next = (): string => {
    const line = lines[pos++];
    if (line === undefined) throw new Error("truncated OFF file");
    return line;
  };

  let countsLine = next();
  if (countsLine.toUpperCase() === "OFF") {
    countsLine = next();
  } else if (countsLine.toUpperCase().startsWith("OFF")) {
    countsLine = countsLine.slice(3).trim();
  }
  const counts = countsLine.split(/\s+/).map(Number);
  if (counts.length < 3 || counts.some(Number.isNaN)) {
    throw new Error(`unreadable OFF counts line: "${countsLine}"`);
  }
  const [nv, nf] = counts as [number, number, number];
  if (nv === 0 || nf === 0) throw new Error("empty mesh");

  const positions = new Float32Array(nv * 3);
  for (let i = 0; i < nv; i++) {
    const fields = next().split(/\s+/).map(Number);
    if (fields.length < 3 || fields.slice(0, 3).some(Number.isNaN)) {
      throw new Error(`bad vertex line ${i}`);
    }
    positions[i * 3] = fields[0]!;
    positions[i * 3 + 1] = fields[1]!;
    positions[i * 3 + 2] = fields[2]!;
  }

  const triangles: number[] = [];
  for (let i = 0; i < nf; i++) {
    const fields = next().split(/\s+/).map(Number);
    const k = fields[0];
    if (k === undefined || Number.isNaN(k) || k < 3 || fields.length < 1 + k) {
      throw new Error(`bad face line ${i}`);
    }
    const idx = fields.slice(1, 1 + k);
    for (const j of idx) {
      if (Number.isNaN(j) || j < 0 || j >= nv) {
        throw new Error(`face ${i} references vertex ${j} of ${nv}`);
      }
    }
    for (let j = 1; j < k - 1; j++) {
      triangles.push(idx[0]!, idx[j]!, idx[j + 1]!);
    }
  }

  return {
    vertexCount: nv,
    faceCount: triangles.length / 3,
    positions,
    triangles: new Uint32Array(triangles),
  };
}
