"""Exception hierarchy. Every error raised by the package derives from
SceneSketchError so callers (notably the CLI) can map failures to exit codes.
"""


class SceneSketchError(Exception):
    """Base class for all scenesketch errors."""


# --- stroke / workspace ---

class DegenerateCorners(SceneSketchError):
    """Workspace corner points are horizontally coincident."""


class EmptySketch(SceneSketchError):
    """Operation requires at least one stroke."""


# --- meshes ---

class EmptyMesh(SceneSketchError):
    """Operation requires a non-empty mesh."""


class DegenerateSegment(SceneSketchError):
    """Polyline collapses to a single point within tolerance."""


class DegenerateBounds(SceneSketchError):
    """Bounding box has no usable extent on any axis."""


class DegenerateInput(SceneSketchError):
    """Point set is collinear or coplanar within tolerance."""


# --- generation / protocol ---

class GenerationFailed(SceneSketchError):
    """A generator could not produce a mesh for the given sketch."""


class BindFailed(SceneSketchError):
    """Server could not bind its port."""


class ProtocolError(SceneSketchError):
    """Malformed frame or envelope on the wire."""

    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message


# --- scene graph ---

class UnknownId(SceneSketchError):
    """No scene object with the given id."""


class UnknownKey(SceneSketchError):
    """No library entry under the given key."""


# --- evaluation ---

class EmptyScene(SceneSketchError):
    """Scene has no objects to evaluate."""


class DegenerateCorrespondence(SceneSketchError):
    """Homography correspondences are collinear or otherwise unsolvable."""


class NoFeasibleMatching(SceneSketchError):
    """Category-locked matching has no feasible pair."""


class TooFewPairs(SceneSketchError):
    """Topology accuracy needs at least two matched pairs."""


class EmptyInput(SceneSketchError):
    """Aggregation requires at least one entry."""


# --- persistence ---

class ParseError(SceneSketchError):
    """Malformed OBJ content; carries the 1-based line number."""

    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class SchemaError(SceneSketchError):
    """JSON document does not match the expected schema; carries a path."""

    def __init__(self, path: str, reason: str):
        super().__init__(f"{path}: {reason}")
        self.path = path
        self.reason = reason


class UnknownWeather(SceneSketchError):
    """Weather string outside the supported enum."""
