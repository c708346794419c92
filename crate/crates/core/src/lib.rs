pub mod coverage;
pub mod ingest;
pub mod lexical;
pub mod model;
pub mod report;
pub mod stats;
pub mod structural;
pub mod synth;
pub mod visibility;
