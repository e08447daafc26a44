use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// The query flavour a piece of text is written in.
///
/// All four share the canonical `COUNT`, `DISTINCT`, `UPPER` and `SUBSTRING`
/// spellings. On top of that:
///
/// | dialect | extra aliases            |
/// |---------|--------------------------|
/// | MySql   | `UCASE`                  |
/// | Oracle  | `SUBSTR`                 |
/// | Db2     | `UCASE`, `SUBSTR`        |
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum Dialect {
    #[default]
    Sql,
    MySql,
    Oracle,
    Db2,
}

impl Dialect {
    pub const ALL: [Dialect; 4] = [Dialect::Sql, Dialect::MySql, Dialect::Oracle, Dialect::Db2];

    pub fn name(self) -> &'static str {
        match self {
            Dialect::Sql => "sql",
            Dialect::MySql => "mysql",
            Dialect::Oracle => "oracle",
            Dialect::Db2 => "db2",
        }
    }

    /// Whether `UCASE(col)` is accepted as an uppercase function.
    pub fn accepts_ucase(self) -> bool {
        matches!(self, Dialect::MySql | Dialect::Db2)
    }

    /// Whether `SUBSTR(col, s, l)` is accepted as a substring function.
    pub fn accepts_substr(self) -> bool {
        matches!(self, Dialect::Oracle | Dialect::Db2)
    }
}

impl fmt::Display for Dialect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown dialect '{0}' (expected sql, mysql, oracle or db2)")]
pub struct UnknownDialect(pub String);

impl FromStr for Dialect {
    type Err = UnknownDialect;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sql" => Ok(Dialect::Sql),
            "mysql" => Ok(Dialect::MySql),
            "oracle" => Ok(Dialect::Oracle),
            "db2" => Ok(Dialect::Db2),
            _ => Err(UnknownDialect(s.to_string())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for d in Dialect::ALL {
            assert_eq!(d.name().parse::<Dialect>().unwrap(), d);
        }
        assert_eq!("MySQL".parse::<Dialect>().unwrap(), Dialect::MySql);
        assert!("postgres".parse::<Dialect>().is_err());
    }

    #[test]
    fn alias_table() {
        assert!(!Dialect::Sql.accepts_ucase() && !Dialect::Sql.accepts_substr());
        assert!(Dialect::MySql.accepts_ucase() && !Dialect::MySql.accepts_substr());
        assert!(!Dialect::Oracle.accepts_ucase() && Dialect::Oracle.accepts_substr());
        assert!(Dialect::Db2.accepts_ucase() && Dialect::Db2.accepts_substr());
    }
}
