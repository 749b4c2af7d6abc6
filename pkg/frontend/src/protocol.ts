// Wire envelopes shared with the generation server. The WebSocket transport
// carries each envelope as one JSON text frame.

export type MessageType = "ping" | "pong" | "generate" | "generate_result" | "error";

export interface Envelope<P = unknown> {
  type: MessageType;
  request_id: string;
  payload: P;
}

export interface WireStroke {
  points: [number, number, number][];
  timestamps: number[];
}

export type GeneratorKind = "tubes" | "hull";

export interface GeneratePayload {
  strokes: WireStroke[];
  generator: GeneratorKind;
  variants: number;
  seed: number;
}

export interface MeshData {
  vertices: [number, number, number][];
  triangles: [number, number, number][];
}

export interface GenerateResultPayload {
  meshes: MeshData[];
}

export interface ErrorPayload {
  code: string;
  message: string;
}

export function makeEnvelope<P>(type: MessageType, requestId: string, payload: P): Envelope<P> {
  return { type, request_id: requestId, payload };
}

export function encodeEnvelope(env: Envelope): string {
  return JSON.stringify(env);
}

export function decodeEnvelope(text: string): Envelope {
  const doc = JSON.parse(text);
  if (typeof doc !== "object" || doc === null) {
    throw new Error("envelope must be a JSON object");
  }
  if (typeof doc.type !== "string" || typeof doc.request_id !== "string") {
    throw new Error("envelope needs string type and request_id");
  }
  return doc as Envelope;
}

export function isError(env: Envelope): env is Envelope<ErrorPayload> {
  return env.type === "error";
}

export function isGenerateResult(env: Envelope): env is Envelope<GenerateResultPayload> {
  return env.type === "generate_result";
}
