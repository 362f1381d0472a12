//! Paillier encryption: homomorphic aggregation and threshold decryption
//! by a group of key-share holders.

use num_bigint::BigUint;
use privsum::paillier::{
    combine_partials, encrypt, hom_add, hom_scale, keygen, partial_decrypt, split_key,
};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

fn main() {
    let mut rng = ChaCha12Rng::seed_from_u64(11);
    let (pk, sk) = keygen(512, &mut rng);
    println!("generated a 512-bit keypair, ciphertexts are {} bytes", pk.ciphertext_bytes());

    // weighted sum 2*10 + 3*20 + 5*30 computed entirely on ciphertexts
    let messages = [10u64, 20, 30];
    let weights = [2u64, 3, 5];
    let mut agg = None;
    for (m, w) in messages.iter().zip(&weights) {
        let c = encrypt(&pk, &BigUint::from(*m), &mut rng).unwrap();
        let scaled = hom_scale(&pk, &c, &BigUint::from(*w)).unwrap();
        agg = Some(match agg {
            None => scaled,
            Some(acc) => hom_add(&pk, &acc, &scaled).unwrap(),
        });
    }
    let agg = agg.unwrap();

    // the private key is split among 5 holders; any 3 can decrypt together
    let holders = [1u64, 2, 3, 4, 5];
    let shares = split_key(sk, &holders, 3, &mut rng).unwrap();
    let meta = shares.combine_meta();
    let partials: Vec<_> = holders[..3]
        .iter()
        .map(|&h| partial_decrypt(&pk, &agg, shares.share_for(h).unwrap()).unwrap())
        .collect();
    let plaintext = combine_partials(&pk, &meta, &partials).unwrap();
    println!("threshold-decrypted weighted sum: {plaintext}");
    assert_eq!(plaintext, BigUint::from(2u64 * 10 + 3 * 20 + 5 * 30));
}
