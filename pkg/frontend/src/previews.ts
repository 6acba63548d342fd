/** Version-counter diffing: decide which stage previews are stale. */

import type { TunerClient } from "./api.js";
import type { SessionState } from "./types.js";

export type Versions = Record<string, number> | null;

/**
 * Stages whose counter advanced between two snapshots, in pipeline order.
 * A null `before` means nothing is rendered yet, so every stage in `after`
 * counts as advanced.
 */
export function advancedStages(
  before: Versions,
  after: Versions,
  order: string[],
): string[] {
  if (after === null) return [];
  return order.filter((stage) => {
    const now = after[stage];
    if (now === undefined) return false;
    const prev = before === null ? undefined : before[stage];
    return prev === undefined || now > prev;
  });
}

/**
 * Tracks which stage version each preview pane currently shows and turns
 * fresh session state into the minimal list of images to re-fetch.
 */
export class PreviewSync {
  private shown: Versions = null;

  constructor(
    private readonly client: TunerClient,
    private readonly order: string[],
  ) {}

  /** Record the new state; return [stage, url] pairs that must be reloaded. */
  refresh(state: SessionState): Array<[string, string]> {
    const stale = advancedStages(this.shown, state.versions, this.order);
    if (state.versions === null) {
      this.shown = null;
      return [];
    }
    this.shown = { ...(this.shown ?? {}), ...state.versions };
    return stale.map((stage) => [
      stage,
      this.client.stageUrl(state.id, stage, state.versions![stage]),
    ]);
  }

  /** Version currently on screen for a stage, if any. */
  shownVersion(stage: string): number | undefined {
    return this.shown === null ? undefined : this.shown[stage];
  }
}
