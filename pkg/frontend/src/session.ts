// One user session: connection, the active sketch, generation round trips,
// the variant carousel, the composed scene, and the exploring camera.
// Geometry authority is the server; the session only installs meshes it
// received in generate_result payloads.

import { MAX_VARIANTS } from "./constants.js";
import { Vec3, boxCenter, boxFromPoints, quatIdentity, sub, v3 } from "./geometry.js";
import {
  Envelope,
  GeneratePayload,
  GeneratorKind,
  MeshData,
  isGenerateResult,
  makeEnvelope,
} from "./protocol.js";
import { SceneState } from "./sceneState.js";
import { SketchState } from "./sketch.js";
import { ProtocolSocket } from "./socket.js";
import { Workspace, defaultWorkspace, toWorld } from "./workspace.js";

export interface CameraPose {
  position: Vec3;
  yaw: number;
  pitch: number;
  eyeHeight: number;
}

export interface VariantSet {
  requestId: string;
  meshes: MeshData[]; // workspace-local coordinates
  selected: number;
}

export class UiSession {
  sketch: SketchState;
  scene = new SceneState();
  variants: VariantSet | null = null;
  selectedObjectId: string | null = null;
  camera: CameraPose = { position: v3(0, 0, 2), yaw: 0, pitch: 0, eyeHeight: 1.6 };
  private requestCounter = 0;

  constructor(
    public readonly socket: ProtocolSocket,
    workspace: Workspace = defaultWorkspace(),
  ) {
    this.sketch = new SketchState(workspace);
  }

  get workspace(): Workspace {
    return this.sketch.workspace;
  }

  alignWorkspace(ws: Workspace) {
    this.sketch.workspace = ws;
  }

  private freshRequestId(prefix: string): string {
    this.requestCounter += 1;
    return `${prefix}-${this.requestCounter}-${Math.random().toString(36).slice(2, 8)}`;
  }

  async ping(): Promise<void> {
    await this.socket.request(makeEnvelope("ping", this.freshRequestId("ping"), {}));
  }

  /** Send the current sketch for generation; resolves with the variants and
   * remembers them for the carousel. */
  async requestGeneration(
    variants: number,
    generator: GeneratorKind,
    seed: number = Math.floor(Math.random() * 2 ** 31),
  ): Promise<VariantSet> {
    if (variants < 1 || variants > MAX_VARIANTS) {
      throw new Error(`variants must be in [1, ${MAX_VARIANTS}]`);
    }
    const strokes = this.sketch.toWire();
    if (!strokes.length) throw new Error("sketch is empty");
    const payload: GeneratePayload = { strokes, generator, variants, seed };
    const requestId = this.freshRequestId("gen");
    const reply: Envelope = await this.socket.request(
      makeEnvelope("generate", requestId, payload),
    );
    if (!isGenerateResult(reply)) {
      throw new Error(`unexpected reply type ${reply.type}`);
    }
    this.variants = { requestId, meshes: reply.payload.meshes, selected: 0 };
    return this.variants;
  }

  selectVariant(index: number) {
    if (!this.variants) throw new Error("no variants to select");
    if (index < 0 || index >= this.variants.meshes.length) {
      throw new Error(`variant index ${index} out of range`);
    }
    this.variants.selected = index;
  }

  /** Install the selected variant into the scene as a world-space object.
   * The mesh arrives in workspace-local coordinates; placement maps it into
   * the world at the workspace pose, then optionally re-centers the object
   * footprint at `at` (ground position) and settles it. */
  placeSelectedVariant(label = "", at?: { x: number; z: number }): string {
    if (!this.variants) throw new Error("no variants generated");
    const local = this.variants.meshes[this.variants.selected];
    const ws = this.workspace;
    const worldVertices = local.vertices.map(([x, y, z]) => {
      const p = toWorld(ws, v3(x, y, z));
      return [p.x, p.y, p.z] as [number, number, number];
    });
    const mesh: MeshData = { vertices: worldVertices, triangles: local.triangles };
    const id = this.scene.place(
      mesh,
      { position: v3(0, 0, 0), rotation: quatIdentity(), scale: v3(1, 1, 1) },
      label,
    );
    if (at) {
      const box = boxFromPoints(worldVertices.map(([x, y, z]) => v3(x, y, z)));
      const center = boxCenter(box);
      const delta = sub(v3(at.x, center.y, at.z), center);
      this.scene.translate(id, v3(delta.x, 0, delta.z));
    }
    this.scene.settle(id);
    this.selectedObjectId = id;
    return id;
  }

  teleport(target: { x: number; z: number }) {
    const b = this.scene.bounds;
    if (target.x < b.min.x || target.x > b.max.x || target.z < b.min.z || target.z > b.max.z) {
      return; // outside the room: ignored
    }
    this.camera.position = v3(target.x, this.camera.eyeHeight, target.z);
  }

  setEyeHeight(height: number) {
    this.camera.eyeHeight = height;
    this.camera.position = v3(this.camera.position.x, height, this.camera.position.z);
  }
}
