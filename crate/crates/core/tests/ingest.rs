use catastroagri_core::ingest::{detect_format, export_csv, parse_csv, FileFormat, HeaderMapping, IngestError};
use proptest::prelude::*;
use rust_decimal::Decimal;

const HEADER: &str = "YEAR,PROVINCE,DISTRICT,SECTOR_EST,NOM_CROP,AREA_SEM_HAS,AREA_ASEG_HAS,AMOUNT_IND_SOLES,NUM_PROD_BENIF";

fn parse(text: &str) -> Result<catastroagri_core::ingest::Dataset, IngestError> {
    parse_csv(text.as_bytes(), &HeaderMapping::default(), "test.csv")
}

#[test]
fn bad_rows_are_isolated() {
    let text = format!(
        "{HEADER}\n2010-2011,P,D,S,C,10,5,2000,3\n2010-2011,P,D,S,C,ten,5,2000,3\n2010-2011,P,D,S,C,10,-5,2000,3\n2010-2011,P,D,S,C,1,5,2000,3\n"
    );
    let ds = parse(&text).unwrap();
    assert_eq!(ds.records.len(), 2);
    assert_eq!(ds.row_errors.iter().map(|e| e.row).collect::<Vec<_>>(), vec![2, 3]);
    assert!(ds.row_errors[1].message.contains("insured_area_has must be ≥ 0"));
    assert_eq!(ds.row_warnings.len(), 1);
    assert_eq!(ds.row_warnings[0].row, 4);
    assert_eq!(ds.data_row_count(), 4);
}

#[test]
fn alternate_headers_and_bom() {
    let text = "\u{feff}CAMPAÑA AGRICOLA,PROVINCIA,DISTRITO,SECTOR ESTADISTICO,CULTIVO,SUP SEM(hs),SUP-ASEG(hs),Mnt INDM,N.PROD BEN\n\
                2010-2011,PUNO,ACORA,S1,Papa,3.5,2.5,1000.0,4\n";
    let ds = parse(text).unwrap();
    assert_eq!(ds.records.len(), 1);
    assert_eq!(ds.records[0].insured_area_has, Decimal::new(25, 1));
    assert_eq!(ds.records[0].indemnity_amount_soles.to_string(), "1000.0");
}

#[test]
fn file_level_errors() {
    assert_eq!(parse("").unwrap_err(), IngestError::EmptyInput);
    assert_eq!(parse(&format!("{HEADER}\n")).unwrap_err(), IngestError::EmptyInput);
    assert!(matches!(parse("A,B\n1,2\n"), Err(IngestError::UnsupportedFormat(_))));
    assert!(matches!(
        parse_csv(b"YEAR\xff\n", &HeaderMapping::default(), "x"),
        Err(IngestError::EncodingError(4))
    ));
    assert_eq!(detect_format("register.CSV"), FileFormat::Csv);
    assert_eq!(detect_format("register.xlsx"), FileFormat::Unsupported("xlsx".into()));
}

#[test]
fn quoted_fields_survive() {
    let text = format!("{HEADER}\n2010-2011,\"SAN ROMAN, JULIACA\",\"say \"\"hi\"\"\",S,C,1,1,400,1\n");
    let ds = parse(&text).unwrap();
    assert_eq!(ds.records[0].province, "SAN ROMAN, JULIACA");
    assert_eq!(ds.records[0].district, "say \"hi\"");
    assert_eq!(String::from_utf8(export_csv(&ds.records)).unwrap(), text);
}

proptest! {
    #[test]
    fn ids_are_unique(n in 1usize..20) {
        let text = format!("{HEADER}\n2010-2011,P,D,S,C,1,1,400,1\n");
        let mut ids: Vec<_> = (0..n).map(|_| parse(&text).unwrap().id).collect();
        ids.sort();
        ids.dedup();
        prop_assert_eq!(ids.len(), n);
    }

    #[test]
    fn any_text_field_round_trips(name in "[ -~ÑñáéíóúÁÉÍÓÚ]{1,20}", area in 0i64..1_000_000, scale in 0u32..4) {
        prop_assume!(!name.trim().is_empty());
        let area = Decimal::new(area, scale);
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(HEADER.split(',')).unwrap();
        w.write_record(["2010-2011", &name, "D", "S", "C", &area.to_string(), &area.to_string(), "0", "0"]).unwrap();
        let bytes = w.into_inner().unwrap();
        let ds = parse_csv(&bytes, &HeaderMapping::default(), "p").unwrap();
        prop_assert_eq!(ds.records.len(), 1);
        prop_assert_eq!(&ds.records[0].province, &name);
        let again = parse_csv(&export_csv(&ds.records), &HeaderMapping::default(), "p").unwrap();
        prop_assert_eq!(&again.records, &ds.records);
        prop_assert_eq!(again.records[0].insured_area_has.to_string(), area.to_string());
    }
}
