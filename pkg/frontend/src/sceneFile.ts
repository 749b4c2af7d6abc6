// Scene JSON in the exact schema the evaluation CLI loads: objects with
// inline meshes, environment, and room bounds.

import { Box3, Vec3, v3 } from "./geometry.js";
import { MeshData } from "./protocol.js";
import {
  EnvironmentState,
  PlacedObject,
  SceneState,
  Transform,
  WEATHER_KINDS,
  Weather,
} from "./sceneState.js";

const vec = (p: Vec3) => [p.x, p.y, p.z];

export function sceneToJson(scene: SceneState): string {
  const doc = {
    bounds: { min: vec(scene.bounds.min), max: vec(scene.bounds.max) },
    environment: {
      time_of_day: scene.environment.timeOfDay,
      weather: scene.environment.weather,
      lights: scene.environment.lights.map((l) => ({
        position: vec(l.position),
        intensity: l.intensity,
        range: l.range,
      })),
    },
    objects: scene.objects.map((o) => ({
      id: o.id,
      label: o.label,
      library_key: o.libraryKey,
      position: vec(o.transform.position),
      quaternion: [...o.transform.rotation],
      scale: vec(o.transform.scale),
      material: { base_color: [...o.material.baseColor], tags: [...o.material.tags] },
      mesh: { vertices: o.mesh.vertices, triangles: o.mesh.triangles },
    })),
  };
  return JSON.stringify(doc, null, 2) + "\n";
}

function asVec3(value: unknown, what: string): Vec3 {
  if (!Array.isArray(value) || value.length !== 3 || value.some((v) => typeof v !== "number")) {
    throw new Error(`${what}: expected [x, y, z]`);
  }
  return v3(value[0], value[1], value[2]);
}

export function sceneFromJson(text: string): SceneState {
  const doc = JSON.parse(text);
  const scene = new SceneState();
  const bounds = doc.bounds ?? {};
  scene.bounds = {
    min: asVec3(bounds.min, "bounds.min"),
    max: asVec3(bounds.max, "bounds.max"),
  } as Box3;
  const env = doc.environment ?? {};
  if (!WEATHER_KINDS.includes(env.weather)) {
    throw new Error(`unknown weather ${env.weather}`);
  }
  const environment: EnvironmentState = {
    timeOfDay: Number(env.time_of_day ?? 12),
    weather: env.weather as Weather,
    lights: (env.lights ?? []).map((l: any) => ({
      position: asVec3(l.position, "light.position"),
      intensity: Number(l.intensity),
      range: Number(l.range),
    })),
  };
  scene.environment = environment;
  for (const o of doc.objects ?? []) {
    if (!o.mesh) throw new Error(`object ${o.id}: library references need the server library`);
    const mesh: MeshData = { vertices: o.mesh.vertices, triangles: o.mesh.triangles };
    const transform: Transform = {
      position: asVec3(o.position, "object.position"),
      rotation: [o.quaternion[0], o.quaternion[1], o.quaternion[2], o.quaternion[3]],
      scale: asVec3(o.scale, "object.scale"),
    };
    const placed: PlacedObject = {
      id: String(o.id),
      label: String(o.label ?? ""),
      libraryKey: o.library_key ?? null,
      mesh,
      transform,
      material: {
        baseColor: [o.material.base_color[0], o.material.base_color[1], o.material.base_color[2]],
        tags: [...(o.material.tags ?? [])],
      },
    };
    scene.objects.push(placed);
  }
  return scene;
}
