/** DOM construction for the tuner page; kept separate so it tests in jsdom. */

import { ParamPanel, SliderSpec } from "./params.js";
import { PreviewSync } from "./previews.js";
import type { SessionState } from "./types.js";

/**
 * Render one range input per tunable, bounded exactly by the server's
 * ranges, with the recommended span and any note as the hover title.
 */
export function renderPanel(
  doc: Document,
  panel: ParamPanel,
  container: HTMLElement,
): Map<string, HTMLInputElement> {
  const inputs = new Map<string, HTMLInputElement>();
  for (const spec of panel.specs.values()) {
    container.appendChild(renderSlider(doc, panel, spec, inputs));
  }
  return inputs;
}

function renderSlider(
  doc: Document,
  panel: ParamPanel,
  spec: SliderSpec,
  inputs: Map<string, HTMLInputElement>,
): HTMLElement {
  const row = doc.createElement("label");
  row.className = "param-row";
  row.dataset.field = spec.field;

  const name = doc.createElement("span");
  name.className = "param-name";
  name.textContent = spec.field.replace(/_/g, " ");
  row.appendChild(name);

  const input = doc.createElement("input");
  input.type = "range";
  input.name = spec.field;
  input.min = String(spec.min);
  input.max = String(spec.max);
  input.step = "1";
  input.title = `permissible ${spec.permissible}; recommended ${spec.recommended[0]}–${spec.recommended[1]}`;
  input.disabled = spec.value === null;
  input.value = String(spec.value ?? spec.recommended[0]);
  input.addEventListener("input", () => {
    panel.setValue(spec.field, Number(input.value));
    readout.textContent = input.value;
  });
  row.appendChild(input);

  const readout = doc.createElement("output");
  readout.className = "param-value";
  readout.textContent = spec.value === null ? "off" : String(spec.value);
  row.appendChild(readout);

  if (spec.nullable) {
    const toggle = doc.createElement("input");
    toggle.type = "checkbox";
    toggle.checked = spec.value !== null;
    toggle.title = "enable";
    toggle.addEventListener("change", () => {
      input.disabled = !toggle.checked;
      const next = toggle.checked ? Number(input.value) : null;
      panel.setValue(spec.field, next);
      readout.textContent = next === null ? "off" : String(next);
    });
    row.appendChild(toggle);
  }

  const error = doc.createElement("span");
  error.className = "param-error";
  error.hidden = true;
  row.appendChild(error);

  inputs.set(spec.field, input);
  return row;
}

/** Show or clear the inline message on the offending control's row. */
export function showFieldError(
  container: HTMLElement,
  field: string,
  message: string | null,
): void {
  const row = container.querySelector<HTMLElement>(
    `.param-row[data-field="${field}"]`,
  );
  const slot = row?.querySelector<HTMLElement>(".param-error");
  if (!slot) return;
  slot.textContent = message ?? "";
  slot.hidden = message === null;
}

/** Stage picker that walks the server's stage order. */
export function renderStageSelector(
  doc: Document,
  stages: string[],
  onSelect: (stage: string) => void,
): { root: HTMLElement; select(stage: string): void; cycle(): void } {
  const root = doc.createElement("nav");
  root.className = "stage-selector";
  const buttons = new Map<string, HTMLButtonElement>();
  let current = stages[stages.length - 1];

  const select = (stage: string) => {
    if (!buttons.has(stage)) return;
    current = stage;
    for (const [name, b] of buttons) {
      b.classList.toggle("active", name === stage);
    }
    onSelect(stage);
  };

  for (const stage of stages) {
    const b = doc.createElement("button");
    b.type = "button";
    b.textContent = stage;
    b.addEventListener("click", () => select(stage));
    buttons.set(stage, b);
    root.appendChild(b);
  }

  const cycle = () => {
    const i = stages.indexOf(current);
    select(stages[(i + 1) % stages.length]);
  };
  return { root, select, cycle };
}

/** Re-point the img elements whose stage versions advanced. */
export function applyRefresh(
  images: Map<string, HTMLImageElement>,
  sync: PreviewSync,
  state: SessionState,
): string[] {
  const refreshed: string[] = [];
  for (const [stage, url] of sync.refresh(state)) {
    const img = images.get(stage);
    if (img) {
      img.src = url;
      refreshed.push(stage);
    }
  }
  return refreshed;
}
