use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("graph must have at least one vertex")]
    Empty,
    #[error("edge ({0},{1}) references a vertex outside the graph")]
    EdgeOutOfRange(u32, u32),
    #[error("self-loop at vertex {0}")]
    SelfLoop(u32),
    #[error("edge ({0},{1}) has non-positive length")]
    NonPositiveLength(u32, u32),
    #[error("graph is not connected: vertex {0} unreachable from basepoint")]
    Unreachable(u32),
    #[error("basepoint {0} outside the vertex range")]
    BadBasepoint(u32),
    #[error("labels length {0} does not match vertex count {1}")]
    BadLabels(usize, usize),
    #[error("ray not asymptotic to Y: tail never enters the {0}-neighborhood")]
    RayNotAsymptotic(String),
    #[error("need at least {0} sample points")]
    TooFewSamples(usize),
}

#[derive(Debug, Error)]
pub enum StructureError {
    #[error("domains: no domain marked maximal")]
    NoMaximal,
    #[error("domains: more than one domain marked maximal ({0} and {1})")]
    TwoMaximal(usize, usize),
    #[error("domains: maximal domain {0} is not above {1} in the nesting order")]
    MaximalNotAbove(usize, usize),
    #[error("relations: table size mismatch")]
    RelationShape,
    #[error("relations: nesting not antisymmetric at ({0},{1})")]
    NotAntisymmetric(usize, usize),
    #[error("relations: nesting not transitive at ({0},{1},{2})")]
    NotTransitive(usize, usize, usize),
    #[error("relations: orthogonality closure fails at ({0} in {1}, {1} orth {2})")]
    OrthogonalityClosure(usize, usize, usize),
    #[error("projections: missing table for domain {0}")]
    MissingProjection(usize),
    #[error("projections: table for domain {0} has length {1}, ambient has {2} vertices")]
    ProjectionShape(usize, usize, usize),
    #[error("projections: domain {0} maps ambient vertex {1} to out-of-range vertex {2}")]
    ProjectionRange(usize, usize, u32),
    #[error("rhos: missing relative projection for pair ({0},{1})")]
    MissingRho(usize, usize),
    #[error("rhos: relative projection for pair ({0},{1}) is empty")]
    EmptyRho(usize, usize),
    #[error("rhos: relative projection for ({0},{1}) lists out-of-range vertex {2}")]
    RhoRange(usize, usize, u32),
    #[error("rhos: downward map for pair ({0},{1}) has wrong length {2}")]
    RhoDownShape(usize, usize, usize),
    #[error("unbounded flag for domain {0} disagrees with measured diameter at threshold")]
    UnboundedFlag(usize),
    #[error("domain {0}: graph invalid: {1}")]
    DomainGraph(usize, GraphError),
    #[error("ambient graph invalid: {0}")]
    AmbientGraph(GraphError),
    #[error("unknown axiom id {0}; valid ids are 1..=11")]
    UnknownAxiom(u32),
    #[error("realization failed for domain {0}; raise kappa_p")]
    RealizationFailed(usize),
    #[error("boundary proxy: {0}")]
    Proxy(String),
    #[error("boundary projection undefined: domain {0} is orthogonal to the whole support")]
    ProjectionUndefined(usize),
    #[error("transfer: r = {0} below the measured lower bound r0 = {1}")]
    BelowR0(String, String),
    #[error("cone-off: {0}")]
    ConeOff(String),
    #[error("format: {0}")]
    Format(String),
}
