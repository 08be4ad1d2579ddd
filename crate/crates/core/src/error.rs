use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeomError {
    #[error("polyline needs at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("consecutive points must be distinct")]
    RepeatedPoint,
    #[error("degenerate boundary (single repeated point)")]
    DegenerateBoundary,
    #[error("polygon has empty interior")]
    EmptyInterior,
}

#[derive(Debug, Error)]
pub enum RasterError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("unexpected EOF")]
    UnexpectedEof,
    #[error("expected grayscale Pf, got {0:?}")]
    BadPfmMagic(String),
    #[error("non-finite heatmap value at index {0}")]
    NonFiniteValue(usize),
    #[error("label {value} at cell {index} exceeds declared class count {num_classes}")]
    LabelOutOfRange {
        value: u16,
        index: usize,
        num_classes: u16,
    },
    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),
    #[error("image decode: {0}")]
    Decode(String),
}

#[derive(Debug, Error)]
pub enum PartitionError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("expected FeatureCollection")]
    NotFeatureCollection,
    #[error("split MultiPolygons upstream")]
    MultiPolygon,
    #[error("feature {0}: non-Polygon geometry")]
    NonPolygonGeometry(usize),
    #[error("feature {0}: missing \"class\" property")]
    MissingClass(usize),
    #[error("feature {0}: unclosed ring")]
    UnclosedRing(usize),
    #[error("feature {0}: ring with fewer than 3 distinct vertices")]
    DegenerateRing(usize),
    #[error("missing top-level {0:?} property")]
    MissingDimension(&'static str),
}

#[derive(Debug, Error)]
pub enum PslgError {
    #[error("non-manifold boundary: dangling edge at vertex {0}")]
    DanglingEdge(usize),
    #[error("hole cycle {0} could not be assigned to a containing face")]
    UnassignableHole(usize),
    #[error("vertex merge created a self-intersecting ring in polygon {0}")]
    SelfIntersectingAfterSnap(usize),
    #[error("vertex merge left polygon {0} with a degenerate ring")]
    DegenerateAfterSnap(usize),
    #[error("mask dimensions {0}x{1} do not match partition {2}x{3}")]
    DimensionMismatch(u32, u32, u32, u32),
}

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("need at least 2 classes to recolor {0} adjacent faces")]
    RecolorInfeasible(usize),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
}
