//! Minimal stderr logger driven by TORSIONLAB_LOG ∈ {error, info, debug}.

use std::sync::OnceLock;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Level {
    Error = 0,
    Info = 1,
    Debug = 2,
}

static LEVEL: OnceLock<Level> = OnceLock::new();

pub fn level() -> Level {
    *LEVEL.get_or_init(|| match std::env::var("TORSIONLAB_LOG").as_deref() {
        Ok("error") => Level::Error,
        Ok("debug") => Level::Debug,
        _ => Level::Info,
    })
}

pub fn info(msg: &str) {
    if level() >= Level::Info {
        eprintln!("[info] {msg}");
    }
}

pub fn debug(msg: &str) {
    if level() >= Level::Debug {
        eprintln!("[debug] {msg}");
    }
}

pub fn error(msg: &str) {
    eprintln!("[error] {msg}");
}
