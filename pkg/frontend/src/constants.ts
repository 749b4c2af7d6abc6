// Shared defaults mirrored from the Python package (documented contract,
// not shared code). Keep in sync with scenesketch.strokes / cli / evaluate.

export const WORKSPACE_SIZE = 0.5; // meters
export const RDP_EPSILON = 0.002; // meters, stroke simplification tolerance
export const TUBE_PREVIEW_RADIUS = 0.005; // meters
export const TUBE_PREVIEW_SIDES = 8;
export const DEFAULT_WS_PATH = "/ws";
export const MAX_VARIANTS = 8;
export const GRID_SPACING = 0.1; // meters, reference lattice
