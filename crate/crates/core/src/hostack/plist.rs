use std::sync::Arc;

struct Cell<T> {
    head: T,
    tail: Option<Arc<Cell<T>>>,
    len: usize,
}

/// Persistent cons list; the head is the top of the stack.
pub(crate) struct PList<T>(Option<Arc<Cell<T>>>);

impl<T> Clone for PList<T> {
    fn clone(&self) -> Self {
        PList(self.0.clone())
    }
}

impl<T> Drop for PList<T> {
    // Long stacks are dropped iteratively.
    fn drop(&mut self) {
        let mut cur = self.0.take();
        while let Some(cell) = cur {
            match Arc::try_unwrap(cell) {
                Ok(mut c) => cur = c.tail.take(),
                Err(_) => break,
            }
        }
    }
}

impl<T> PList<T> {
    pub(crate) fn new() -> Self {
        PList(None)
    }

    pub(crate) fn len(&self) -> usize {
        self.0.as_ref().map_or(0, |c| c.len)
    }

    pub(crate) fn push(&self, x: T) -> Self {
        let len = self.len() + 1;
        PList(Some(Arc::new(Cell {
            head: x,
            tail: self.0.clone(),
            len,
        })))
    }

    pub(crate) fn top(&self) -> Option<&T> {
        self.0.as_ref().map(|c| &c.head)
    }

    pub(crate) fn pop(&self) -> Option<Self> {
        self.0.as_ref().map(|c| PList(c.tail.clone()))
    }

    /// Top to bottom.
    pub(crate) fn iter(&self) -> Iter<'_, T> {
        Iter {
            cur: self.0.as_deref(),
        }
    }

    /// Keeps the bottom `n` elements.
    pub(crate) fn truncate(&self, n: usize) -> Self {
        let mut cur = self.0.clone();
        while let Some(c) = cur.as_ref() {
            if c.len <= n {
                break;
            }
            cur = c.tail.clone();
        }
        PList(cur)
    }

    pub(crate) fn addr(&self) -> usize {
        self.0.as_ref().map_or(0, |c| Arc::as_ptr(c) as usize)
    }

    pub(crate) fn ptr_eq(&self, other: &Self) -> bool {
        match (&self.0, &other.0) {
            (Some(a), Some(b)) => Arc::ptr_eq(a, b),
            (None, None) => true,
            _ => false,
        }
    }
}

impl<T: Clone> PList<T> {
    /// Bottom to top.
    pub(crate) fn to_vec(&self) -> Vec<T> {
        let mut v: Vec<T> = self.iter().cloned().collect();
        v.reverse();
        v
    }

    pub(crate) fn from_bottom_up(items: impl IntoIterator<Item = T>) -> Self {
        items.into_iter().fold(PList::new(), |acc, x| acc.push(x))
    }
}

pub(crate) struct Iter<'a, T> {
    cur: Option<&'a Cell<T>>,
}

impl<'a, T> Iterator for Iter<'a, T> {
    type Item = &'a T;

    fn next(&mut self) -> Option<&'a T> {
        let c = self.cur?;
        self.cur = c.tail.as_deref();
        Some(&c.head)
    }
}
