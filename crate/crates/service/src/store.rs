use std::collections::BTreeMap;
use std::sync::{Arc, RwLock};

use catastroagri_core::ingest::{Dataset, DatasetId};

/// Immutable dataset snapshots keyed by id. Inserting beyond capacity
/// evicts the oldest dataset.
#[derive(Debug)]
pub struct DatasetStore {
    capacity: usize,
    datasets: RwLock<BTreeMap<DatasetId, Arc<Dataset>>>,
}

impl DatasetStore {
    pub fn new(capacity: usize) -> Self {
        Self {
            capacity: capacity.max(1),
            datasets: RwLock::new(BTreeMap::new()),
        }
    }

    pub fn insert(&self, dataset: Dataset) -> Arc<Dataset> {
        let dataset = Arc::new(dataset);
        let mut map = self.datasets.write().unwrap_or_else(|e| e.into_inner());
        map.insert(dataset.id, Arc::clone(&dataset));
        while map.len() > self.capacity {
            map.pop_first();
        }
        dataset
    }

    pub fn get(&self, id: DatasetId) -> Option<Arc<Dataset>> {
        self.datasets
            .read()
            .unwrap_or_else(|e| e.into_inner())
            .get(&id)
            .cloned()
    }

    pub fn list(&self) -> Vec<Arc<Dataset>> {
        self.datasets
            .read()
            .unwrap_or_else(|e| e.into_inner())
            .values()
            .cloned()
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use catastroagri_core::fixtures::PUNO_BY_CROP;
    use catastroagri_core::ingest::{parse_csv, HeaderMapping};

    fn dataset() -> Dataset {
        parse_csv(PUNO_BY_CROP.as_bytes(), &HeaderMapping::default(), "crop").unwrap()
    }

    #[test]
    fn evicts_oldest_first() {
        let store = DatasetStore::new(2);
        let a = store.insert(dataset()).id;
        let b = store.insert(dataset()).id;
        let c = store.insert(dataset()).id;
        assert!(store.get(a).is_none());
        assert!(store.get(b).is_some() && store.get(c).is_some());
        assert_eq!(store.list().len(), 2);
    }
}
