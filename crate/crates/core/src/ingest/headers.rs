use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use super::IngestError;

/// The nine register columns every input file must provide.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Column {
    Year,
    Province,
    District,
    SectorEst,
    NomCrop,
    AreaSemHas,
    AreaAsegHas,
    AmountIndSoles,
    NumProdBenif,
}

impl Column {
    pub const ALL: [Column; 9] = [
        Column::Year,
        Column::Province,
        Column::District,
        Column::SectorEst,
        Column::NomCrop,
        Column::AreaSemHas,
        Column::AreaAsegHas,
        Column::AmountIndSoles,
        Column::NumProdBenif,
    ];

    pub fn canonical(&self) -> &'static str {
        match self {
            Column::Year => "YEAR",
            Column::Province => "PROVINCE",
            Column::District => "DISTRICT",
            Column::SectorEst => "SECTOR_EST",
            Column::NomCrop => "NOM_CROP",
            Column::AreaSemHas => "AREA_SEM_HAS",
            Column::AreaAsegHas => "AREA_ASEG_HAS",
            Column::AmountIndSoles => "AMOUNT_IND_SOLES",
            Column::NumProdBenif => "NUM_PROD_BENIF",
        }
    }

    fn default_aliases(&self) -> &'static [&'static str] {
        match self {
            Column::Year => &["YEAR", "CAMPAIGN", "CAMPAIGN_YEAR", "CAMPAÑA AGRICOLA", "CAMPANA", "AÑO"],
            Column::Province => &["PROVINCE", "PROVINCIA"],
            Column::District => &["DISTRICT", "DISTRITO"],
            Column::SectorEst => &["SECTOR_EST", "SECTOR EST", "STATISTICAL SECTOR", "SECTOR ESTADISTICO"],
            Column::NomCrop => &["NOM_CROP", "NOM CROP", "CROP NAME", "CROP", "CULTIVO", "NOM CULTIVO"],
            Column::AreaSemHas => &["AREA_SEM_HAS", "AREA SEM(Has)", "SOWN AREA (Has)", "SUP SEM(hs)"],
            Column::AreaAsegHas => &[
                "AREA_ASEG_HAS",
                "AREA ASEG(Has)",
                "INSURED AREA (Has)",
                "SUP-ASEG(hs)",
                "SUPER ASEGUR",
            ],
            Column::AmountIndSoles => &[
                "AMOUNT_IND_SOLES",
                "AMOUNT INDN(S)",
                "Amount Ind (Soles)",
                "Mnt INDM",
                "AMOUNT INDEM S/.",
            ],
            Column::NumProdBenif => &["NUM_PROD_BENIF", "NUM PROD BENIF", "N. of prod benefited", "N.PROD BEN"],
        }
    }
}

impl fmt::Display for Column {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.canonical())
    }
}

/// Header comparison form: letters and digits only, upper-cased.
pub fn normalize_header(header: &str) -> String {
    header
        .chars()
        .filter(|c| c.is_alphanumeric())
        .flat_map(char::to_uppercase)
        .collect()
}

/// Accepted spellings for each [`Column`].
#[derive(Debug, Clone)]
pub struct HeaderMapping {
    lookup: HashMap<String, Column>,
}

impl Default for HeaderMapping {
    fn default() -> Self {
        let aliases = Column::ALL
            .iter()
            .map(|c| (*c, c.default_aliases().iter().map(|s| s.to_string()).collect()));
        Self::new(aliases).expect("built-in header aliases are disjoint")
    }
}

impl HeaderMapping {
    /// Builds a mapping; every column needs an alias and aliases may not be shared.
    pub fn new<I>(aliases: I) -> Result<Self, IngestError>
    where
        I: IntoIterator<Item = (Column, Vec<String>)>,
    {
        let mut lookup = HashMap::new();
        for (column, names) in aliases {
            for name in names {
                let key = normalize_header(&name);
                if let Some(prev) = lookup.insert(key, column) {
                    if prev != column {
                        return Err(IngestError::InvalidMapping(format!(
                            "alias '{name}' is claimed by both {prev} and {column}"
                        )));
                    }
                }
            }
        }
        for column in Column::ALL {
            if !lookup.values().any(|c| *c == column) {
                return Err(IngestError::InvalidMapping(format!("{column} has no alias")));
            }
        }
        Ok(Self { lookup })
    }

    pub fn resolve(&self, header: &str) -> Option<Column> {
        self.lookup.get(&normalize_header(header)).copied()
    }

    /// Maps each canonical column to its index in `headers`.
    pub(crate) fn locate(&self, headers: &[String]) -> Result<[usize; 9], IngestError> {
        let mut found: [Option<usize>; 9] = [None; 9];
        for (i, header) in headers.iter().enumerate() {
            if let Some(col) = self.resolve(header) {
                let slot = &mut found[col as usize];
                if slot.is_some() {
                    return Err(IngestError::UnsupportedFormat(format!(
                        "column {col} appears more than once"
                    )));
                }
                *slot = Some(i);
            }
        }
        let missing: Vec<&str> = Column::ALL
            .iter()
            .filter(|c| found[**c as usize].is_none())
            .map(Column::canonical)
            .collect();
        if !missing.is_empty() {
            return Err(IngestError::UnsupportedFormat(format!(
                "missing required columns: {}",
                missing.join(", ")
            )));
        }
        Ok(found.map(|f| f.unwrap()))
    }
}
