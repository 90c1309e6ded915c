//! Mapping errors onto the process exit-code contract.

use std::process::ExitCode;

use insight_core::Error;

pub const USAGE: u8 = 2;
pub const INTERNAL: u8 = 3;

/// Exit code for an error: user-facing input and configuration problems are
/// usage errors, anything the library reports as an internal invariant
/// breach is internal.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<Error>() {
            return match e {
                Error::Precondition(_) | Error::Degenerate(_) => INTERNAL,
                _ => USAGE,
            };
        }
    }
    USAGE
}

pub fn report(err: &anyhow::Error) -> ExitCode {
    eprintln!("error: {err:#}");
    ExitCode::from(exit_code(err))
}

#[cfg(test)]
mod tests {
    use super::*;
    use anyhow::Context;

    #[test]
    fn classifies_through_context() {
        let usage = anyhow::Error::from(Error::UnknownColumn("x".into())).context("loading");
        assert_eq!(exit_code(&usage), USAGE);
        let internal: anyhow::Result<()> = Err(Error::Degenerate("empty".into())).context("fitting");
        assert_eq!(exit_code(&internal.unwrap_err()), INTERNAL);
        assert_eq!(exit_code(&anyhow::anyhow!("bad flag")), USAGE);
    }
}
