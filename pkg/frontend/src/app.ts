/** DOM wiring for the search console. All behavior lives in SearchStore and
 * ModelViewer; this layer only reflects state and forwards events. */

import { ApiClient } from "./api";
import { prChartSvg } from "./prchart";
import { SearchStore, type UiState } from "./state";
import { ModelViewer, WebGLSurface } from "./viewer";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function mountApp(root: HTMLElement): void {
  const api = new ApiClient();
  const store = new SearchStore(api);

  root.innerHTML = `
    <header>
      <h1>shape3d search console</h1>
      <div id="banner" hidden><span id="banner-text"></span><button id="banner-close">x</button></div>
    </header>
    <main>
      <aside id="catalog">
        <h2>Corpus</h2>
        <ul id="model-list"></ul>
      </aside>
      <section id="center">
        <div id="viewer"></div>
        <form id="controls">
          <fieldset>
            <legend>Weights</legend>
            <label>measures <input type="range" id="w-measures" min="0" max="3" step="0.1" value="1">
              <span id="w-measures-v">1.0</span></label>
            <label>indexes <input type="range" id="w-indexes" min="0" max="3" step="0.1" value="1">
              <span id="w-indexes-v">1.0</span></label>
            <label>moments <input type="range" id="w-moments" min="0" max="3" step="0.1" value="1">
              <span id="w-moments-v">1.0</span></label>
          </fieldset>
          <fieldset>
            <legend>Stages</legend>
            <label><input type="checkbox" id="use-classifier" checked> classify</label>
            <label><input type="checkbox" id="use-ontology" checked> ontology filter</label>
            <label>results <input type="number" id="k" min="1" max="50" value="12"></label>
          </fieldset>
          <button type="submit" id="submit">Search</button>
          <span id="busy" hidden>searching…</span>
        </form>
        <div id="results" class="grid"></div>
      </section>
      <aside id="evalpanel">
        <h2>Precision / recall</h2>
        <select id="class-select"><option value="">choose a class</option></select>
        <div id="pr-chart"></div>
      </aside>
    </main>
  `;

  const viewerHost = root.querySelector<HTMLDivElement>("#viewer")!;
  const viewer = new ModelViewer(new WebGLSurface(viewerHost), (id) => api.fetchMeshText(id));

  const banner = root.querySelector<HTMLDivElement>("#banner")!;
  const bannerText = root.querySelector<HTMLSpanElement>("#banner-text")!;
  root.querySelector<HTMLButtonElement>("#banner-close")!.onclick = () => store.dismissError();

  const modelList = root.querySelector<HTMLUListElement>("#model-list")!;
  const results = root.querySelector<HTMLDivElement>("#results")!;
  const busy = root.querySelector<HTMLSpanElement>("#busy")!;
  const classSelect = root.querySelector<HTMLSelectElement>("#class-select")!;
  const prChart = root.querySelector<HTMLDivElement>("#pr-chart")!;

  for (const group of ["measures", "indexes", "moments"] as const) {
    const slider = root.querySelector<HTMLInputElement>(`#w-${group}`)!;
    const label = root.querySelector<HTMLSpanElement>(`#w-${group}-v`)!;
    slider.oninput = () => {
      label.textContent = Number(slider.value).toFixed(1);
      store.setWeight(group, Number(slider.value)); // staged only, no request
    };
  }
  root.querySelector<HTMLInputElement>("#use-classifier")!.onchange = (e) =>
    store.setUseClassifier((e.target as HTMLInputElement).checked);
  root.querySelector<HTMLInputElement>("#use-ontology")!.onchange = (e) =>
    store.setUseOntology((e.target as HTMLInputElement).checked);
  root.querySelector<HTMLInputElement>("#k")!.onchange = (e) =>
    store.setResultCount(Number((e.target as HTMLInputElement).value));

  root.querySelector<HTMLFormElement>("#controls")!.onsubmit = (e) => {
    e.preventDefault();
    void store.submit();
  };

  classSelect.onchange = () => {
    if (classSelect.value) void store.selectClass(classSelect.value);
  };

  let renderedModels = "";
  let renderedClasses = "";
  let shownModel: string | null = null;

  function render(state: UiState): void {
    banner.hidden = state.error === null;
    bannerText.textContent = state.error ?? "";
    busy.hidden = !state.busy;

    const modelKey = state.models.map((m) => m.id).join(",") + "|" + state.selectedId;
    if (modelKey !== renderedModels) {
      renderedModels = modelKey;
      modelList.replaceChildren(
        ...state.models.map((m) => {
          const item = el("li", m.id === state.selectedId ? "selected" : "");
          const button = el("button", "model-pick", m.id);
          button.append(el("span", "badge", m.class ?? "?"));
          button.onclick = () => {
            store.select(m.id);
            void viewer.show(m.id);
          };
          item.append(button);
          return item;
        }),
      );
    }

    const classKey = state.classes.join(",");
    if (classKey !== renderedClasses) {
      renderedClasses = classKey;
      classSelect.replaceChildren(
        new Option("choose a class", ""),
        ...state.classes.map((c) => new Option(c, c)),
      );
    }

    if (state.selectedId && state.selectedId !== shownModel) {
      shownModel = state.selectedId;
      void viewer.show(state.selectedId);
    }

    results.replaceChildren(
      ...state.results.map((r, rank) => {
        const card = el("button", "card" + (r.passed_filter ? "" : " outside"));
        card.append(
          el("div", "rank", `#${rank + 1}`),
          el("div", "card-id", r.model_id),
          el("div", "dist", r.distance.toFixed(4)),
          el("span", "badge", r.predicted_class ?? "?"),
          el("span", "badge filter", r.passed_filter ? "in filter" : "backfill"),
        );
        card.onclick = () => void store.clickResult(r.model_id);
        return card;
      }),
    );

    prChart.innerHTML = state.prCurve ? prChartSvg(state.prCurve) : "";
  }

  store.subscribe(render);
  render(store.state);
  void store.loadCatalog();
}
