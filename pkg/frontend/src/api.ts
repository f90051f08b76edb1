/** Typed client for the shape3d retrieval service. Read-only by design:
 * nothing here can mutate server state. */

export interface ModelSummary {
  id: string;
  class: string | null;
  label: Record<string, number>;
}

export interface ModelDetail extends ModelSummary {
  indexes: Record<string, number>;
  moments: number[];
  volume: number;
  surface_area: number;
}

export interface RankedResult {
  model_id: string;
  distance: number;
  predicted_class: string | null;
  passed_filter: boolean;
}

export interface Weights {
  measures: number;
  indexes: number;
  moments: number;
}

export interface QueryRequest {
  model_id: string;
  k?: number;
  weights?: Weights;
  use_classifier?: boolean;
  use_ontology?: boolean;
}

export interface ClassInfo {
  name: string;
  count: number;
}

export type PrPoint = [recall: number, precision: number];

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function asJson<T>(resp: Response): Promise<T> {
  if (!resp.ok) {
    let message = `${resp.status}`;
    try {
      const body = (await resp.json()) as { error?: string };
      if (body.error) message = body.error;
    } catch {
      // non-JSON error body, keep the status code
    }
    throw new Error(message);
  }
  return (await resp.json()) as T;
}

export class ApiClient {
  private readonly meshCache = new Map<string, Promise<string>>();

  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  listModels(): Promise<ModelSummary[]> {
    return this.fetchFn(`${this.baseUrl}/api/models`).then((r) => asJson<ModelSummary[]>(r));
  }

  getModel(id: string): Promise<ModelDetail> {
    return this.fetchFn(`${this.baseUrl}/api/models/${encodeURIComponent(id)}`).then((r) =>
      asJson<ModelDetail>(r),
    );
  }

  listClasses(): Promise<ClassInfo[]> {
    return this.fetchFn(`${this.baseUrl}/api/classes`).then((r) => asJson<ClassInfo[]>(r));
  }

  /** Raw OFF text for a model, cached so re-rendering never refetches. */
  fetchMeshText(id: string): Promise<string> {
    const cached = this.meshCache.get(id);
    if (cached) return cached;
    const pending = this.fetchFn(`${this.baseUrl}/api/models/${encodeURIComponent(id)}/mesh`).then(
      async (resp) => {
        if (!resp.ok) throw new Error(`mesh fetch failed: ${resp.status}`);
        return resp.text();
      },
    );
    // a failed fetch must not poison the cache
    pending.catch(() => this.meshCache.delete(id));
    this.meshCache.set(id, pending);
    return pending;
  }

  query(request: QueryRequest): Promise<RankedResult[]> {
    return this.fetchFn(`${this.baseUrl}/api/query`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(request),
    })
      .then((r) => asJson<{ results: RankedResult[] }>(r))
      .then((body) => body.results);
  }

  async prCurve(className: string): Promise<PrPoint[]> {
    const resp = await this.fetchFn(
      `${this.baseUrl}/api/eval/pr?class=${encodeURIComponent(className)}`,
    );
    if (!resp.ok) throw new Error(`pr curve failed: ${resp.status}`);
    return parsePrCsv(await resp.text());
  }
}

export function parsePrCsv(csv: string): PrPoint[] {
  const lines = csv.trim().split(/\r?\n/);
  const points: PrPoint[] = [];
  for (const line of lines.slice(1)) {
    const [recall, precision] = line.split(",").map(Number);
    if (recall !== undefined && precision !== undefined && !Number.isNaN(recall)) {
      points.push([recall, precision ?? 0]);
    }
  }
  return points;
}
