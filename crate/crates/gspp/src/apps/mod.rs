//! Application adapters: instance generators for machine scheduling and
//! berth allocation, and the crew-recovery matching bound.

pub mod bacap;
pub mod crew;
pub mod scheduling;

pub use bacap::{enumerate_bacap, enumerate_bacap_from, sample_vessels, BacapParams, Vessel};
pub use crew::{crew_brute_force, crew_lb2, read_crew, read_crew_file, CrewInstance, Duty};
pub use scheduling::{enumerate_scheduling, sample_sched, Job, SchedGen, SchedParams};
