mod analyze;
mod bench;
mod plotdata;
mod simulate;
mod validate;

pub use analyze::run as analyze;
pub use bench::run as bench;
pub use plotdata::run as plotdata;
pub use simulate::run as simulate;
pub use validate::run as validate;
