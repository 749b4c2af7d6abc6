// Calibrated cubic drawing volume. Local coordinates live in [0, size]^3;
// +y is up, the yaw rotates the local frame about +y. Same conventions as
// the server so encoded strokes agree in both directions.

import { Vec3, v3 } from "./geometry.js";
import { WORKSPACE_SIZE } from "./constants.js";

export interface Workspace {
  origin: Vec3; // front-lower-left corner, world frame
  size: number;
  yaw: number; // radians about +y
}

export function defaultWorkspace(): Workspace {
  return { origin: v3(0, 0, 0), size: WORKSPACE_SIZE, yaw: 0 };
}

/** Heading of left->right in the ground plane becomes the yaw; the origin
 * sits at the left corner lifted to the corners' mean height. */
export function workspaceFromCorners(
  left: Vec3,
  right: Vec3,
  size: number = WORKSPACE_SIZE,
): Workspace {
  const dx = right.x - left.x;
  const dz = right.z - left.z;
  if (Math.hypot(dx, dz) < 1e-6) {
    throw new Error("corners coincide in the ground plane");
  }
  return {
    origin: v3(left.x, (left.y + right.y) / 2, left.z),
    size,
    yaw: Math.atan2(-dz, dx),
  };
}

export function toLocal(ws: Workspace, p: Vec3): Vec3 {
  const dx = p.x - ws.origin.x;
  const dy = p.y - ws.origin.y;
  const dz = p.z - ws.origin.z;
  const c = Math.cos(ws.yaw);
  const s = Math.sin(ws.yaw);
  return v3(c * dx - s * dz, dy, s * dx + c * dz);
}

export function toWorld(ws: Workspace, p: Vec3): Vec3 {
  const c = Math.cos(ws.yaw);
  const s = Math.sin(ws.yaw);
  return v3(
    ws.origin.x + c * p.x + s * p.z,
    ws.origin.y + p.y,
    ws.origin.z - s * p.x + c * p.z,
  );
}

export type MirrorPlane = "left_right" | "front_back";

/** Reflect a workspace-local point across the cube's central vertical
 * plane: x' = size - x for left/right, z' = size - z for front/back. */
export function mirrorLocal(ws: Workspace, p: Vec3, plane: MirrorPlane): Vec3 {
  if (plane === "left_right") return v3(ws.size - p.x, p.y, p.z);
  return v3(p.x, p.y, ws.size - p.z);
}

export function mirrorWorld(ws: Workspace, p: Vec3, plane: MirrorPlane): Vec3 {
  return toWorld(ws, mirrorLocal(ws, toLocal(ws, p), plane));
}

/** Reference lattice in world coordinates; counts are floor(size/spacing)+1
 * per axis with horizontal spacing on x/z and vertical on y. */
export function gridPoints(ws: Workspace, spacingH: number, spacingV: number): Vec3[] {
  const nH = Math.floor(ws.size / spacingH + 1e-9) + 1;
  const nV = Math.floor(ws.size / spacingV + 1e-9) + 1;
  const out: Vec3[] = [];
  for (let i = 0; i < nH; i++) {
    for (let j = 0; j < nV; j++) {
      for (let k = 0; k < nH; k++) {
        out.push(toWorld(ws, v3(i * spacingH, j * spacingV, k * spacingH)));
      }
    }
  }
  return out;
}
