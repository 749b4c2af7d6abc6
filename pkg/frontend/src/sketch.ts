// Active sketch state: pointer capture into strokes, line mode, live
// mirroring. Strokes are simplified client-side with the same tolerance the
// server uses, and strokes with fewer than 2 points are dropped.

import { RDP_EPSILON } from "./constants.js";
import { Vec3, distance, simplifyPolyline } from "./geometry.js";
import { MirrorPlane, Workspace, mirrorWorld } from "./workspace.js";
import { WireStroke } from "./protocol.js";
import { toLocal } from "./workspace.js";

export type StrokeMode = "freehand" | "line";

export interface UiStroke {
  id: string;
  mode: StrokeMode;
  points: Vec3[]; // world frame
  timestamps: number[];
  mirrorOf: { sourceId: string; plane: MirrorPlane } | null;
}

export interface MirrorToggles {
  leftRight: boolean;
  frontBack: boolean;
}

interface ActiveCapture {
  mode: StrokeMode;
  points: Vec3[];
  timestamps: number[];
}

export class SketchState {
  strokes: UiStroke[] = [];
  mirrors: MirrorToggles = { leftRight: false, frontBack: false };
  private active: ActiveCapture | null = null;
  private counter = 0;

  constructor(public workspace: Workspace) {}

  get isDrawing(): boolean {
    return this.active !== null;
  }

  private freshId(): string {
    this.counter += 1;
    return `stroke-${this.counter}`;
  }

  beginStroke(mode: StrokeMode, at: Vec3, t: number) {
    this.active = { mode, points: [at], timestamps: [t] };
  }

  extendStroke(at: Vec3, t: number) {
    if (!this.active) return;
    const pts = this.active.points;
    if (pts.length && distance(pts[pts.length - 1], at) < 1e-9) return;
    pts.push(at);
    const ts = this.active.timestamps;
    ts.push(Math.max(t, ts[ts.length - 1]));
  }

  /** Finish the capture; returns the new strokes (original + mirrors), or
   * an empty list when the gesture had fewer than 2 distinct points. */
  endStroke(): UiStroke[] {
    const active = this.active;
    this.active = null;
    if (!active || active.points.length < 2) return [];
    let points: Vec3[];
    let timestamps: number[];
    if (active.mode === "line") {
      points = [active.points[0], active.points[active.points.length - 1]];
      timestamps = [active.timestamps[0], active.timestamps[active.timestamps.length - 1]];
    } else {
      points = simplifyPolyline(active.points, RDP_EPSILON);
      timestamps = points.map((p) => {
        const i = active.points.indexOf(p);
        return active.timestamps[i >= 0 ? i : 0];
      });
      if (points.length < 2) return [];
    }
    const stroke: UiStroke = {
      id: this.freshId(),
      mode: active.mode,
      points,
      timestamps,
      mirrorOf: null,
    };
    const added = [stroke];
    this.strokes.push(stroke);
    if (this.mirrors.leftRight) added.push(this.addMirror(stroke, "left_right"));
    if (this.mirrors.frontBack) added.push(this.addMirror(stroke, "front_back"));
    return added;
  }

  private addMirror(stroke: UiStroke, plane: MirrorPlane): UiStroke {
    const mirrored: UiStroke = {
      id: `${stroke.id}~${plane}`,
      mode: stroke.mode,
      points: stroke.points.map((p) => mirrorWorld(this.workspace, p, plane)),
      timestamps: [...stroke.timestamps],
      mirrorOf: { sourceId: stroke.id, plane },
    };
    this.strokes.push(mirrored);
    return mirrored;
  }

  removeStroke(id: string) {
    this.strokes = this.strokes.filter(
      (s) => s.id !== id && s.mirrorOf?.sourceId !== id,
    );
  }

  clear() {
    this.strokes = [];
    this.active = null;
  }

  /** Workspace-local stroke arrays for a generate request, timestamps
   * rebased so the earliest sample is 0. */
  toWire(): WireStroke[] {
    if (!this.strokes.length) return [];
    const t0 = Math.min(...this.strokes.map((s) => s.timestamps[0]));
    return this.strokes.map((s) => ({
      points: s.points.map((p) => {
        const q = toLocal(this.workspace, p);
        return [q.x, q.y, q.z] as [number, number, number];
      }),
      timestamps: s.timestamps.map((t) => t - t0),
    }));
  }
}
