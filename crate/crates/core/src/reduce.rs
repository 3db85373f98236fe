/// Pairwise reduction in a fixed tree order, independent of how the
/// inputs were produced.
pub(crate) fn pairwise<T: Copy>(items: &[T], zero: T, add: &impl Fn(T, T) -> T) -> T {
    match items.len() {
        0 => zero,
        1 => items[0],
        n if n <= 8 => items[1..].iter().fold(items[0], |acc, &x| add(acc, x)),
        n => {
            let (left, right) = items.split_at(n / 2);
            add(pairwise(left, zero, add), pairwise(right, zero, add))
        }
    }
}
