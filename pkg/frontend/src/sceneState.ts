// Client-side scene model. Transform semantics (corner-anchored scaling,
// axis rotation, gravity settling) mirror the server's scene graph so a
// scene saved here evaluates identically there. Mesh geometry is never
// touched client-side: every mesh comes verbatim from a server response.

import {
  Box3,
  Quat,
  Vec3,
  add,
  boxFromPoints,
  quatFromAxisAngle,
  quatIdentity,
  quatMultiply,
  quatNormalize,
  quatRotate,
  scale as vscale,
  sub,
  v3,
} from "./geometry.js";
import { MeshData } from "./protocol.js";

export type Weather = "clear" | "cloudy" | "foggy" | "rainy" | "snowy";
export const WEATHER_KINDS: Weather[] = ["clear", "cloudy", "foggy", "rainy", "snowy"];

export interface Transform {
  position: Vec3;
  rotation: Quat;
  scale: Vec3; // per-axis, > 0
}

export const identityTransform = (): Transform => ({
  position: v3(0, 0, 0),
  rotation: quatIdentity(),
  scale: v3(1, 1, 1),
});

export interface Material {
  baseColor: [number, number, number];
  tags: string[];
}

export interface PlacedObject {
  id: string;
  label: string;
  libraryKey: string | null;
  mesh: MeshData;
  transform: Transform;
  material: Material;
}

export interface LightSource {
  position: Vec3;
  intensity: number;
  range: number;
}

export interface EnvironmentState {
  timeOfDay: number; // hours, wraps mod 24
  weather: Weather;
  lights: LightSource[];
}

const REST_GAP = 1e-6;

export function applyTransform(t: Transform, p: Vec3): Vec3 {
  const scaled = v3(p.x * t.scale.x, p.y * t.scale.y, p.z * t.scale.z);
  return add(quatRotate(t.rotation, scaled), t.position);
}

export function worldBox(obj: PlacedObject): Box3 {
  return boxFromPoints(
    obj.mesh.vertices.map(([x, y, z]) => applyTransform(obj.transform, v3(x, y, z))),
  );
}

export class SceneState {
  objects: PlacedObject[] = [];
  environment: EnvironmentState = { timeOfDay: 12, weather: "clear", lights: [] };
  bounds: Box3 = { min: v3(-5, 0, -5), max: v3(5, 3, 5) };
  private counter = 0;

  private freshId(): string {
    const taken = new Set(this.objects.map((o) => o.id));
    let id: string;
    do {
      this.counter += 1;
      id = `obj-${this.counter}`;
    } while (taken.has(id));
    return id;
  }

  place(mesh: MeshData, transform: Transform, label = "", material?: Material): string {
    const id = this.freshId();
    this.objects.push({
      id,
      label,
      libraryKey: null,
      mesh,
      transform,
      material: material ?? { baseColor: [0.8, 0.8, 0.8], tags: [] },
    });
    return id;
  }

  get(id: string): PlacedObject {
    const found = this.objects.find((o) => o.id === id);
    if (!found) throw new Error(`no object ${id}`);
    return found;
  }

  duplicate(id: string): string {
    const src = this.get(id);
    const copy: PlacedObject = {
      ...src,
      id: this.freshId(),
      transform: {
        position: { ...src.transform.position },
        rotation: [...src.transform.rotation] as Quat,
        scale: { ...src.transform.scale },
      },
    };
    this.objects.push(copy);
    return copy.id;
  }

  remove(id: string) {
    this.get(id); // throws on unknown ids
    this.objects = this.objects.filter((o) => o.id !== id);
  }

  /** Uniform scale about the world AABB corner opposite the dragged one.
   * Corner flags pick max (true) or min per axis for the dragged corner. */
  scaleAboutFixedCorner(id: string, dragged: [boolean, boolean, boolean], factor: number) {
    if (factor <= 0) throw new Error("factor must be > 0");
    const obj = this.get(id);
    const box = worldBox(obj);
    const fixed = v3(
      dragged[0] ? box.min.x : box.max.x,
      dragged[1] ? box.min.y : box.max.y,
      dragged[2] ? box.min.z : box.max.z,
    );
    const t = obj.transform;
    obj.transform = {
      position: add(fixed, vscale(sub(t.position, fixed), factor)),
      rotation: t.rotation,
      scale: v3(t.scale.x * factor, t.scale.y * factor, t.scale.z * factor),
    };
  }

  rotateAboutAxis(id: string, axis: "x" | "y" | "z", angle: number) {
    const obj = this.get(id);
    const unit = axis === "x" ? v3(1, 0, 0) : axis === "y" ? v3(0, 1, 0) : v3(0, 0, 1);
    const q = quatFromAxisAngle(unit, angle);
    obj.transform = {
      ...obj.transform,
      rotation: quatNormalize(quatMultiply(q, obj.transform.rotation)),
    };
  }

  scaleAxis(id: string, axis: "x" | "y" | "z", factor: number) {
    if (factor <= 0) throw new Error("factor must be > 0");
    const obj = this.get(id);
    const s = { ...obj.transform.scale };
    s[axis] *= factor;
    obj.transform = { ...obj.transform, scale: s };
  }

  translate(id: string, delta: Vec3) {
    const obj = this.get(id);
    obj.transform = { ...obj.transform, position: add(obj.transform.position, delta) };
  }

  /** Drop straight down onto the highest overlapping support top or the
   * floor at y=0; never moves an object upward. */
  settle(id: string) {
    const obj = this.get(id);
    const box = worldBox(obj);
    let support = 0;
    for (const other of this.objects) {
      if (other.id === id) continue;
      const ob = worldBox(other);
      const overlapX = box.min.x < ob.max.x && ob.min.x < box.max.x;
      const overlapZ = box.min.z < ob.max.z && ob.min.z < box.max.z;
      if (overlapX && overlapZ && ob.max.y <= box.min.y + REST_GAP) {
        support = Math.max(support, ob.max.y);
      }
    }
    const drop = box.min.y - support;
    if (drop > 0) this.translate(id, v3(0, -drop, 0));
  }

  setTimeOfDay(hours: number) {
    this.environment.timeOfDay = ((hours % 24) + 24) % 24;
  }

  setWeather(weather: Weather) {
    this.environment.weather = weather;
  }

  addLight(light: LightSource) {
    this.environment.lights.push(light);
  }
}

/** Direction of incoming sunlight (unit vector, down at noon); elevation
 * dips below the horizon outside 6h-18h. Same model as the server. */
export function sunDirection(timeOfDay: number): Vec3 {
  const h = ((timeOfDay % 24) + 24) % 24;
  const elevation = (Math.PI / 2) * Math.sin((Math.PI * (h - 6)) / 12);
  const azimuth = (Math.PI * (h - 6)) / 12;
  const ce = Math.cos(elevation);
  return v3(
    -ce * Math.cos(azimuth),
    -Math.sin(elevation),
    -ce * Math.sin(azimuth),
  );
}

export function sunElevation(timeOfDay: number): number {
  const h = ((timeOfDay % 24) + 24) % 24;
  return (Math.PI / 2) * Math.sin((Math.PI * (h - 6)) / 12);
}
