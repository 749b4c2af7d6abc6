// Small vector and polyline helpers kept free of three.js so they run in
// any test environment. Semantics match the server implementation.

export interface Vec3 {
  x: number;
  y: number;
  z: number;
}

export type Quat = [number, number, number, number]; // [w, x, y, z]

export const v3 = (x: number, y: number, z: number): Vec3 => ({ x, y, z });

export function add(a: Vec3, b: Vec3): Vec3 {
  return v3(a.x + b.x, a.y + b.y, a.z + b.z);
}

export function sub(a: Vec3, b: Vec3): Vec3 {
  return v3(a.x - b.x, a.y - b.y, a.z - b.z);
}

export function scale(a: Vec3, s: number): Vec3 {
  return v3(a.x * s, a.y * s, a.z * s);
}

export function dot(a: Vec3, b: Vec3): number {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

export function norm(a: Vec3): number {
  return Math.sqrt(dot(a, a));
}

export function distance(a: Vec3, b: Vec3): number {
  return norm(sub(a, b));
}

export function pointSegmentDistance(p: Vec3, a: Vec3, b: Vec3): number {
  const ab = sub(b, a);
  const denom = dot(ab, ab);
  if (denom === 0) return distance(p, a);
  const t = Math.min(1, Math.max(0, dot(sub(p, a), ab) / denom));
  return distance(p, add(a, scale(ab, t)));
}

/**
 * Ramer-Douglas-Peucker with 3D point-to-segment distance. Endpoints are
 * kept; interior points survive only when strictly farther than epsilon
 * from the bracketing chord, matching the server's simplification.
 */
export function simplifyPolyline(points: Vec3[], epsilon: number): Vec3[] {
  if (points.length < 2) throw new Error("need at least 2 points");
  if (epsilon < 0) throw new Error("epsilon must be >= 0");
  const keep = new Array<boolean>(points.length).fill(false);
  keep[0] = keep[points.length - 1] = true;
  const stack: Array<[number, number]> = [[0, points.length - 1]];
  while (stack.length) {
    const [first, last] = stack.pop()!;
    let dMax = epsilon;
    let idx = -1;
    for (let i = first + 1; i < last; i++) {
      const d = pointSegmentDistance(points[i], points[first], points[last]);
      if (d > dMax) {
        dMax = d;
        idx = i;
      }
    }
    if (idx >= 0) {
      keep[idx] = true;
      stack.push([first, idx], [idx, last]);
    }
  }
  return points.filter((_, i) => keep[i]);
}

// --- quaternions, [w, x, y, z] ---

export const quatIdentity = (): Quat => [1, 0, 0, 0];

export function quatMultiply(a: Quat, b: Quat): Quat {
  const [aw, ax, ay, az] = a;
  const [bw, bx, by, bz] = b;
  return [
    aw * bw - ax * bx - ay * by - az * bz,
    aw * bx + ax * bw + ay * bz - az * by,
    aw * by - ax * bz + ay * bw + az * bx,
    aw * bz + ax * by - ay * bx + az * bw,
  ];
}

export function quatNormalize(q: Quat): Quat {
  const n = Math.hypot(q[0], q[1], q[2], q[3]);
  if (n === 0) throw new Error("zero quaternion");
  return [q[0] / n, q[1] / n, q[2] / n, q[3] / n];
}

export function quatFromAxisAngle(axis: Vec3, angle: number): Quat {
  const n = norm(axis);
  const s = Math.sin(angle / 2) / n;
  return [Math.cos(angle / 2), axis.x * s, axis.y * s, axis.z * s];
}

export function quatRotate(q: Quat, p: Vec3): Vec3 {
  const u = v3(q[1], q[2], q[3]);
  const t = scale(cross(u, p), 2);
  return add(add(p, scale(t, q[0])), cross(u, t));
}

export function cross(a: Vec3, b: Vec3): Vec3 {
  return v3(
    a.y * b.z - a.z * b.y,
    a.z * b.x - a.x * b.z,
    a.x * b.y - a.y * b.x,
  );
}

// --- axis-aligned boxes ---

export interface Box3 {
  min: Vec3;
  max: Vec3;
}

export function boxFromPoints(points: Vec3[]): Box3 {
  if (!points.length) throw new Error("no points");
  const min = v3(Infinity, Infinity, Infinity);
  const max = v3(-Infinity, -Infinity, -Infinity);
  for (const p of points) {
    min.x = Math.min(min.x, p.x);
    min.y = Math.min(min.y, p.y);
    min.z = Math.min(min.z, p.z);
    max.x = Math.max(max.x, p.x);
    max.y = Math.max(max.y, p.y);
    max.z = Math.max(max.z, p.z);
  }
  return { min, max };
}

export function boxCenter(b: Box3): Vec3 {
  return scale(add(b.min, b.max), 0.5);
}
