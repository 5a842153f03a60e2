//! Instance generation: artificial datasets, timetables, vehicle schedules
//! and labeled corpora.

mod corpus;
mod dataset;
pub mod fixtures;
mod schedule;
mod timetable;

pub use corpus::{build_instance, collect_corpus, default_variants, gen_corpus, CorpusConfig, CorpusEntry, VariantSpec};
pub use dataset::{gen_dataset, DatasetSpec, DemandSpec, DriveSpec, LineSpec, Topology};
pub use schedule::{gen_schedule, ScheduleStrategy};
pub use timetable::{gen_timetable, TimetableStrategy};
