/** Annotation session state and interaction logic, kept DOM-free.
 *
 * Selections are constrained to the trial's vocabulary and progress
 * domain fetched from the server, so the UI can never submit a state
 * the server would reject. Writes are optimistic: a stale version gets
 * a conflict banner and the local edit is retained, never silently
 * overwritten or dropped.
 */
import {
  ApiRequestError,
  LabelServiceClient,
  TrialInfo,
} from "./api.js";

export type BannerKind = "conflict" | "offline" | "error" | null;

export interface SessionView {
  frame: number;
  frameCount: number;
  selections: number[];
  dirty: boolean;
  version: number;
  labeledCount: number;
  banner: BannerKind;
  bannerMessage: string;
  currentLabel: string | null;
}

const SLOT_COUNT = 5;
const PROGRESS_SLOT = 4;

export function renderState(selections: number[]): string {
  return selections.join("");
}

export class AnnotationSessionController {
  readonly sessionId: string;
  private labels = new Map<number, string>();
  private version = 0;
  private frame = 0;
  private selections: number[] = [0, 0, 0, 0, 0];
  private dirty = false;
  private banner: BannerKind = null;
  private bannerMessage = "";
  onUpdate: (view: SessionView) => void = () => {};

  constructor(
    private readonly client: LabelServiceClient,
    readonly trial: TrialInfo,
    readonly annotator: string,
  ) {
    this.sessionId = `${trial.id}__${annotator}`;
  }

  async load(): Promise<void> {
    const snapshot = await this.client.getSession(this.sessionId);
    this.labels = new Map(
      Object.entries(snapshot.labels).map(([k, v]) => [Number(k), v]),
    );
    this.version = snapshot.version;
    this.syncSelectionsToFrame();
    this.notify();
  }

  allowedCodes(slot: number): number[] {
    const options =
      slot === PROGRESS_SLOT ? this.trial.progress : this.trial.vocabulary;
    return options.map((o) => o.code);
  }

  setVariable(slot: number, code: number): void {
    if (slot < 0 || slot >= SLOT_COUNT) {
      throw new RangeError(`no state variable at slot ${slot}`);
    }
    if (!this.allowedCodes(slot).includes(code)) {
      throw new RangeError(
        `code ${code} not allowed for ${this.trial.variables[slot]}`,
      );
    }
    if (this.selections[slot] !== code) {
      this.selections[slot] = code;
      this.dirty = true;
    }
    this.notify();
  }

  /** Persist the current frame's selections; true when nothing is pending
   * afterwards. Conflicts and transport failures set a banner and keep
   * the local edit. */
  async save(): Promise<boolean> {
    if (!this.dirty) {
      return true;
    }
    const state = renderState(this.selections);
    try {
      const result = await this.client.putLabel(
        this.sessionId,
        this.frame,
        state,
        this.version,
      );
      this.version = result.version;
      this.labels.set(this.frame, state);
      this.dirty = false;
      this.clearBanner();
      return true;
    } catch (err) {
      this.showError(err, "saving label");
      return false;
    }
  }

  async next(): Promise<boolean> {
    return this.goTo(this.frame + 1);
  }

  async prev(): Promise<boolean> {
    return this.goTo(this.frame - 1);
  }

  /** Save-on-navigate: a failed save keeps the user on the dirty frame. */
  async goTo(frame: number): Promise<boolean> {
    if (frame < 0 || frame >= this.trial.frame_count) {
      return false;
    }
    if (!(await this.save())) {
      this.notify();
      return false;
    }
    this.frame = frame;
    this.syncSelectionsToFrame();
    this.notify();
    return true;
  }

  /** One-keystroke copy of the previous frame's state onto this frame. */
  async copyPrevious(): Promise<boolean> {
    if (this.frame === 0 || !this.labels.has(this.frame - 1)) {
      this.setBanner("error", "previous frame has no label to copy");
      this.notify();
      return false;
    }
    return this.carryRange(this.frame - 1, this.frame);
  }

  /** Carry the current frame's state forward through `target`. */
  async carryTo(target: number): Promise<boolean> {
    if (target < this.frame || target >= this.trial.frame_count) {
      this.setBanner("error", `cannot carry to frame ${target}`);
      this.notify();
      return false;
    }
    if (!(await this.save())) {
      this.notify();
      return false;
    }
    if (!this.labels.has(this.frame)) {
      this.setBanner("error", "label the current frame before carrying");
      this.notify();
      return false;
    }
    const ok = await this.carryRange(this.frame, target);
    if (ok) {
      this.frame = target;
      this.syncSelectionsToFrame();
      this.notify();
    }
    return ok;
  }

  private async carryRange(from: number, to: number): Promise<boolean> {
    try {
      const result = await this.client.carry(this.sessionId, from, to);
      this.version = result.version;
      const state = this.labels.get(from)!;
      for (let k = from; k <= to; k += 1) {
        this.labels.set(k, state);
      }
      this.syncSelectionsToFrame();
      this.clearBanner();
      this.notify();
      return true;
    } catch (err) {
      this.showError(err, "carrying label");
      this.notify();
      return false;
    }
  }

  /** Drop local state in favor of the server's (the conflict banner's
   * reload action). */
  async reloadFromServer(): Promise<void> {
    const snapshot = await this.client.getSession(this.sessionId);
    this.labels = new Map(
      Object.entries(snapshot.labels).map(([k, v]) => [Number(k), v]),
    );
    this.version = snapshot.version;
    this.dirty = false;
    this.clearBanner();
    this.syncSelectionsToFrame();
    this.notify();
  }

  async exportTranscript(): Promise<string> {
    return this.client.exportTranscript(this.sessionId);
  }

  view(): SessionView {
    return {
      frame: this.frame,
      frameCount: this.trial.frame_count,
      selections: [...this.selections],
      dirty: this.dirty,
      version: this.version,
      labeledCount: this.labels.size,
      banner: this.banner,
      bannerMessage: this.bannerMessage,
      currentLabel: this.labels.get(this.frame) ?? null,
    };
  }

  labelFor(frame: number): string | null {
    return this.labels.get(frame) ?? null;
  }

  private syncSelectionsToFrame(): void {
    const stored = this.labels.get(this.frame);
    if (stored !== undefined) {
      this.selections = stored.split("").map(Number);
    }
    // an unlabeled frame keeps the previous selections on screen, but is
    // only written once the annotator edits or explicitly saves
    this.dirty = false;
  }

  private showError(err: unknown, doing: string): void {
    if (err instanceof ApiRequestError) {
      if (err.code === "VersionConflict") {
        this.setBanner(
          "conflict",
          `another writer moved this session to version ${err.version}; ` +
            "reload to pick up their labels",
        );
      } else {
        this.setBanner("error", `${err.code} while ${doing}: ${err.message}`);
      }
    } else {
      this.setBanner(
        "offline",
        `request failed while ${doing}; edits are kept locally`,
      );
    }
    this.notify();
  }

  private setBanner(kind: BannerKind, message: string): void {
    this.banner = kind;
    this.bannerMessage = message;
  }

  private clearBanner(): void {
    this.banner = null;
    this.bannerMessage = "";
  }

  private notify(): void {
    this.onUpdate(this.view());
  }
}
