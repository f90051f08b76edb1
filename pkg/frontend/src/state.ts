/** UI state and the submit/requery loop.
 *
 * Contract highlights, enforced here rather than in the DOM layer:
 * - slider and toggle changes only stage values; no request leaves until
 *   submit() (explicit-submit contract),
 * - the visible result list always corresponds to the most recently
 *   submitted (query, weights, toggles) tuple: a stale response from a
 *   superseded submission is dropped,
 * - a failed submission surfaces a dismissible error banner and leaves the
 *   rest of the state untouched,
 * - clicking a result makes it the query and resubmits (the requery loop).
 */

import type { ApiClient, ModelSummary, PrPoint, RankedResult, Weights } from "./api";

export interface SubmittedQuery {
  modelId: string;
  weights: Weights;
  useClassifier: boolean;
  useOntology: boolean;
}

export interface UiState {
  models: ModelSummary[];
  classes: string[];
  selectedId: string | null;
  weights: Weights;
  useClassifier: boolean;
  useOntology: boolean;
  resultCount: number;
  results: RankedResult[];
  resultsFor: SubmittedQuery | null;
  busy: boolean;
  error: string | null;
  selectedClass: string | null;
  prCurve: PrPoint[] | null;
}

export const DEFAULT_RESULT_COUNT = 12;

function initialState(): UiState {
  return {
    models: [],
    classes: [],
    selectedId: null,
    weights: { measures: 1, indexes: 1, moments: 1 },
    useClassifier: true,
    useOntology: true,
    resultCount: DEFAULT_RESULT_COUNT,
    results: [],
    resultsFor: null,
    busy: false,
    error: null,
    selectedClass: null,
    prCurve: null,
  };
}

export type Listener = (state: UiState) => void;

export class SearchStore {
  state: UiState = initialState();
  private listeners: Listener[] = [];
  private querySeq = 0;

  constructor(private readonly api: ApiClient) {}

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private emit(): void {
    for (const listener of this.listeners) listener(this.state);
  }

  private patch(partial: Partial<UiState>): void {
    this.state = { ...this.state, ...partial };
    this.emit();
  }

  async loadCatalog(): Promise<void> {
    try {
      const [models, classes] = await Promise.all([
        this.api.listModels(),
        this.api.listClasses(),
      ]);
      this.patch({ models, classes: classes.map((c) => c.name) });
    } catch (err) {
      this.patch({ error: message(err) });
    }
  }

  /** Staging setters: never fire a request. */
  select(id: string): void {
    this.patch({ selectedId: id });
  }

  setWeight(group: keyof Weights, value: number): void {
    this.patch({ weights: { ...this.state.weights, [group]: value } });
  }

  setUseClassifier(on: boolean): void {
    this.patch({ useClassifier: on });
  }

  setUseOntology(on: boolean): void {
    this.patch({ useOntology: on });
  }

  setResultCount(k: number): void {
    this.patch({ resultCount: Math.max(1, Math.floor(k)) });
  }

  dismissError(): void {
    this.patch({ error: null });
  }

  /** POST the staged query; later submissions supersede earlier responses. */
  async submit(): Promise<void> {
    const id = this.state.selectedId;
    if (id === null) {
      this.patch({ error: "select a query model first" });
      return;
    }
    const submitted: SubmittedQuery = {
      modelId: id,
      weights: { ...this.state.weights },
      useClassifier: this.state.useClassifier,
      useOntology: this.state.useOntology,
    };
    const seq = ++this.querySeq;
    this.patch({ busy: true });
    try {
      const results = await this.api.query({
        model_id: submitted.modelId,
        k: this.state.resultCount,
        weights: submitted.weights,
        use_classifier: submitted.useClassifier,
        use_ontology: submitted.useOntology,
      });
      if (seq !== this.querySeq) return; // superseded by a newer submit
      this.patch({ results, resultsFor: submitted, busy: false, error: null });
    } catch (err) {
      if (seq !== this.querySeq) return;
      this.patch({ busy: false, error: message(err) });
    }
  }

  /** The click-to-requery loop: a result card becomes the next query. */
  async clickResult(id: string): Promise<void> {
    this.select(id);
    await this.submit();
  }

  async selectClass(name: string): Promise<void> {
    this.patch({ selectedClass: name, prCurve: null });
    try {
      const curve = await this.api.prCurve(name);
      if (this.state.selectedClass === name) this.patch({ prCurve: curve });
    } catch (err) {
      this.patch({ error: message(err) });
    }
  }
}

function message(err: unknown): string {
  return err instanceof Error ? err.message : String(err);
}
