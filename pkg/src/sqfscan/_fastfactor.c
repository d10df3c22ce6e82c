/* Fast deterministic factorization for integers below 2**94.
 *
 * Pipeline: trial division by primes < 10^4, Miller-Rabin (fixed bases,
 * provably deterministic below ~3.19e23, fixed extra bases plus a strong
 * Lucas test above), perfect-power extraction, then Brent-cycle Pollard
 * rho over Montgomery arithmetic with a deterministic sequence of
 * polynomial constants.
 *
 * Two modes:
 *   mode 0 (full): every returned part is prime.
 *   mode 1 (capped): rho hunts only for factors up to cbrt(m); a cofactor
 *     that survives the hunt, is composite, and is not a perfect power is
 *     returned as a "squarefree atom" (kind 1): it must be a product of
 *     two distinct primes, both above cbrt(m).  This is what makes bulk
 *     squarefree-part extraction cheap: products of two large primes are
 *     squarefree and never need to be split.
 *
 * Results are deterministic: no randomness anywhere.
 */

#define PY_SSIZE_T_CLEAN
#include <Python.h>

#include <math.h>
#include <stdint.h>

typedef unsigned __int128 u128;
typedef uint64_t u64;
typedef uint32_t u32;

#define MAX_BITS 94
#define TRIAL_BOUND 10000

static u32 small_primes[1300];
static int n_small_primes = 0;

static void init_small_primes(void)
{
    static char comp[TRIAL_BOUND + 1];
    for (int p = 2; p * p <= TRIAL_BOUND; p++)
        if (!comp[p])
            for (int q = p * p; q <= TRIAL_BOUND; q += p)
                comp[q] = 1;
    for (int p = 2; p <= TRIAL_BOUND; p++)
        if (!comp[p])
            small_primes[n_small_primes++] = (u32)p;
}

/* ---------------- basic u128 helpers ---------------- */

static int bits_u128(u128 n)
{
    u64 hi = (u64)(n >> 64);
    if (hi)
        return 128 - __builtin_clzll(hi);
    u64 lo = (u64)n;
    return lo ? 64 - __builtin_clzll(lo) : 0;
}

static u128 gcd_u128(u128 a, u128 b)
{
    if (a == 0)
        return b;
    if (b == 0)
        return a;
    int sh_a = (u64)a ? __builtin_ctzll((u64)a) : 64 + __builtin_ctzll((u64)(a >> 64));
    int sh_b = (u64)b ? __builtin_ctzll((u64)b) : 64 + __builtin_ctzll((u64)(b >> 64));
    int shift = sh_a < sh_b ? sh_a : sh_b;
    a >>= sh_a;
    while (b) {
        b >>= ((u64)b ? __builtin_ctzll((u64)b) : 64 + __builtin_ctzll((u64)(b >> 64)));
        if (a > b) {
            u128 t = a;
            a = b;
            b = t;
        }
        b -= a;
    }
    return a << shift;
}

static u64 isqrt_u128(u128 n)
{
    if (n == 0)
        return 0;
    u64 x = (u64)sqrtl((long double)n);
    while (x > 0 && (u128)x * x > n)
        x--;
    while ((u128)(x + 1) * (x + 1) <= n)
        x++;
    return x;
}

static u64 iroot_u128(u128 n, int k)
{
    if (n == 0)
        return 0;
    u64 x = (u64)powl((long double)n, 1.0L / k) + 1;
    while (x > 1) {
        u128 p = 1;
        int of = 0;
        for (int i = 0; i < k; i++) {
            if (p > (u128)1 << 120) {
                of = 1;
                break;
            }
            p *= x;
        }
        if (!of && p <= n)
            break;
        x--;
    }
    while (1) {
        u128 p = 1;
        int of = 0;
        for (int i = 0; i < k; i++) {
            if (p > (u128)1 << 120) {
                of = 1;
                break;
            }
            p *= x + 1;
        }
        if (of || p > n)
            break;
        x++;
    }
    return x;
}

/* mulmod valid for n < 2**94, no Montgomery context needed (slow path) */
static u128 mulmod_slow(u128 a, u128 b, u128 n)
{
    a %= n;
    b %= n;
    u64 a2 = (u64)(a >> 64);
    u64 a1 = (u64)(a >> 32) & 0xffffffffu;
    u64 a0 = (u64)a & 0xffffffffu;
    u128 acc = ((u128)a2 * b) % n;
    acc = (acc << 32) % n;
    acc = (acc + (u128)a1 * b) % n;
    acc = (acc << 32) % n;
    acc = (acc + (u128)a0 * b) % n;
    return acc;
}

/* ---------------- Montgomery arithmetic, odd n < 2**94 ---------------- */

typedef struct {
    u128 n;
    u64 nprime; /* -n^{-1} mod 2^64 */
    u128 r2;    /* 2^256 mod n */
    u128 one;   /* 2^128 mod n */
} mont;

static u64 inv64(u64 n)
{
    u64 x = n; /* correct to 3 bits */
    for (int i = 0; i < 5; i++)
        x *= 2 - n * x;
    return x;
}

static void mont_init(mont *m, u128 n)
{
    m->n = n;
    m->nprime = (u64)(0 - inv64((u64)n));
    m->one = ((u128)0 - n) % n; /* 2^128 mod n */
    m->r2 = mulmod_slow(m->one, m->one, n);
}

static inline u128 montmul(u128 a, u128 b, const mont *m)
{
    u64 a0 = (u64)a, a1 = (u64)(a >> 64);
    u64 b0 = (u64)b, b1 = (u64)(b >> 64);
    u128 lo = (u128)a0 * b0;
    u128 m1 = (u128)a0 * b1;
    u128 m2 = (u128)a1 * b0;
    u128 hi = (u128)a1 * b1;
    u64 t0 = (u64)lo;
    u128 s = (lo >> 64) + (u64)m1 + (u64)m2;
    u64 t1 = (u64)s;
    u64 t2 = (u64)((s >> 64) + (m1 >> 64) + (m2 >> 64) + (u64)hi);

    u64 n0 = (u64)m->n, n1 = (u64)(m->n >> 64);
    u64 mm = t0 * m->nprime;
    u128 x0 = (u128)mm * n0 + t0;
    u128 x1 = (u128)mm * n1 + t1 + (u64)(x0 >> 64);
    u128 T1 = ((u128)t2 << 64) + x1;

    mm = (u64)T1 * m->nprime;
    x0 = (u128)mm * n0 + (u64)T1;
    x1 = (u128)mm * n1 + (u64)(T1 >> 64) + (u64)(x0 >> 64);
    if (x1 >= m->n)
        x1 -= m->n;
    return x1;
}

static u128 mont_pow(u128 base_m, u128 e, const mont *m)
{
    u128 acc = m->one;
    while (e) {
        if ((u64)e & 1)
            acc = montmul(acc, base_m, m);
        base_m = montmul(base_m, base_m, m);
        e >>= 1;
    }
    return acc;
}

/* ---------------- primality ---------------- */

static const u32 mr_bases_small[12] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
static const u32 mr_bases_big[25] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41,
                                     43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97};

/* 318665857834031151167461 = deterministic bound for the first 12 bases */
static const u128 MR12_BOUND_HI = 17274ull;          /* value >> 64 */
static const u64 MR12_BOUND_LO = 5390561121217132645ull; /* value & 2^64-1 */

static u128 mr12_bound(void)
{
    return ((u128)MR12_BOUND_HI << 64) | MR12_BOUND_LO;
}

static int mr_witness(u128 n, u128 d, int r, u32 a, const mont *m)
{
    /* returns 1 if composite witnessed */
    u128 am = montmul((u128)a % n, m->r2, m);
    u128 x = mont_pow(am, d, m);
    u128 nm1 = n - 1;
    u128 one = m->one;
    u128 m_nm1 = montmul(nm1 % n, m->r2, m);
    if (x == one || x == m_nm1)
        return 0;
    for (int i = 0; i < r - 1; i++) {
        x = montmul(x, x, m);
        if (x == m_nm1)
            return 0;
    }
    return 1;
}

static int jacobi_i64_u128(int64_t a_in, u128 n)
{
    /* jacobi(a/n) for odd n > 0 */
    u128 a;
    int result = 1;
    if (a_in < 0) {
        a = (u128)(-a_in) % n;
        a = a ? n - a : 0;
    } else {
        a = (u128)a_in % n;
    }
    while (a) {
        while (!((u64)a & 1)) {
            a >>= 1;
            u64 nm8 = (u64)n & 7;
            if (nm8 == 3 || nm8 == 5)
                result = -result;
        }
        u128 t = a;
        a = n;
        n = t;
        if (((u64)a & 3) == 3 && ((u64)n & 3) == 3)
            result = -result;
        a %= n;
    }
    return n == 1 ? result : 0;
}

static int strong_lucas(u128 n, const mont *m)
{
    u64 s = isqrt_u128(n);
    if ((u128)s * s == n)
        return 0;
    int64_t D = 5;
    while (1) {
        int j = jacobi_i64_u128(D, n);
        if (j == -1)
            break;
        if (j == 0)
            return 0; /* D < n always here, so gcd(D, n) > 1 */
        D = D > 0 ? -(D + 2) : -(D - 2);
    }
    /* P = 1, Q = (1 - D) / 4 */
    int64_t Q = (1 - D) / 4;
    u128 Qm; /* Q in Montgomery form */
    if (Q >= 0)
        Qm = montmul((u128)Q % n, m->r2, m);
    else {
        u128 q = (u128)(-Q) % n;
        Qm = montmul(q ? n - q : 0, m->r2, m);
    }
    u128 Dm;
    if (D >= 0)
        Dm = montmul((u128)D % n, m->r2, m);
    else {
        u128 d = (u128)(-D) % n;
        Dm = montmul(d ? n - d : 0, m->r2, m);
    }
    u128 d = n + 1;
    int r = 0;
    while (!((u64)d & 1)) {
        d >>= 1;
        r++;
    }
    /* half = (n+1)/2 in Montgomery form for divisions by 2 */
    u128 half_plain = (n + 1) >> 1;
    u128 halfm = montmul(half_plain, m->r2, m);
    u128 U = 0, V = montmul((u128)2, m->r2, m), qk = m->one;
    u128 onem = m->one;
    int top = bits_u128(d);
    for (int i = top - 1; i >= 0; i--) {
        /* double */
        U = montmul(U, V, m);
        u128 two_qk = qk << 1 >= m->n ? (qk << 1) - m->n : qk << 1;
        /* careful: qk < n so qk<<1 < 2n fits u128 (n < 2^94) */
        u128 VV = montmul(V, V, m);
        V = VV >= two_qk ? VV - two_qk : VV + m->n - two_qk;
        qk = montmul(qk, qk, m);
        if ((d >> i) & 1) {
            /* add one: U' = (U + V)/2, V' = (D*U + V)/2 */
            u128 Usum = U + V >= m->n ? U + V - m->n : U + V;
            u128 DU = montmul(Dm, U, m);
            u128 Vsum = DU + V >= m->n ? DU + V - m->n : DU + V;
            U = montmul(Usum, halfm, m);
            V = montmul(Vsum, halfm, m);
            qk = montmul(qk, Qm, m);
        }
    }
    (void)onem;
    if (U == 0 || V == 0)
        return 1;
    for (int i = 0; i < r - 1; i++) {
        u128 two_qk = qk << 1 >= m->n ? (qk << 1) - m->n : qk << 1;
        u128 VV = montmul(V, V, m);
        V = VV >= two_qk ? VV - two_qk : VV + m->n - two_qk;
        if (V == 0)
            return 1;
        qk = montmul(qk, qk, m);
    }
    return 0;
}

static int is_prime_u128(u128 n)
{
    if (n < 2)
        return 0;
    for (int i = 0; i < 12; i++) {
        u32 p = mr_bases_small[i];
        if (n % p == 0)
            return n == p;
    }
    if (n < (u128)41 * 41)
        return 1;
    mont m;
    mont_init(&m, n);
    u128 d = n - 1;
    int r = 0;
    while (!((u64)d & 1)) {
        d >>= 1;
        r++;
    }
    int big = n >= mr12_bound();
    int nb = big ? 25 : 12;
    const u32 *bases = big ? mr_bases_big : mr_bases_small;
    for (int i = 0; i < nb; i++) {
        if (mr_witness(n, d, r, bases[i], &m))
            return 0;
    }
    if (big && !strong_lucas(n, &m))
        return 0;
    return 1;
}

/* ---------------- Pollard rho (Brent) ---------------- */

/* status: 1 found (returned), 0 cap reached cleanly, -1 aborted (g == n) */
static u128 rho_attempt(u128 n, u64 c, u64 max_iter, int *status, const mont *m)
{
    u128 cc = (u128)c;
    u128 y = ((u128)c + 2) % n;
    u128 x = y, ys = y, q = 1;
    u64 r = 1, iters = 0;
    u128 g = 1;
    while (g == 1) {
        x = y;
        for (u64 i = 0; i < r; i++) {
            y = montmul(y, y, m) + cc;
            if (y >= n)
                y -= n;
        }
        u64 k = 0;
        while (k < r && g == 1) {
            ys = y;
            u64 lim = r - k < 128 ? r - k : 128;
            for (u64 i = 0; i < lim; i++) {
                y = montmul(y, y, m) + cc;
                if (y >= n)
                    y -= n;
                q = montmul(q, x > y ? x - y : y - x, m);
            }
            g = gcd_u128(q, n);
            k += lim;
            iters += lim;
            if (max_iter && iters >= max_iter && g == 1) {
                *status = 0;
                return 0;
            }
        }
        r <<= 1;
    }
    if (g == n) {
        /* backtrack one step at a time */
        u64 guard = 0;
        do {
            ys = montmul(ys, ys, m) + cc;
            if (ys >= n)
                ys -= n;
            g = gcd_u128(x > ys ? x - ys : ys - x, n);
        } while (g == 1 && ++guard < 100000);
    }
    if (g == n || g == 1) {
        *status = -1;
        return 0;
    }
    *status = 1;
    return g;
}

/* find any nontrivial factor; if cap_hunt, only certify-hunt up to cbrt */
static u128 rho_factor(u128 n, int cap_hunt, int *gave_up, const mont *m)
{
    *gave_up = 0;
    u64 max_iter = 0;
    if (cap_hunt) {
        u64 u = iroot_u128(n, 3);
        if ((u128)u * u * u < n)
            u += 1; /* ceil */
        if (u <= TRIAL_BOUND) {
            /* composite, no factor <= 10^4, and all bad patterns need a
             * factor <= cbrt: must already be p*q */
            *gave_up = 1;
            return 0;
        }
        max_iter = 8 * (u64)isqrt_u128((u128)u) + 1024;
    }
    for (u64 c = 1; c < 64; c++) {
        int status;
        u128 g = rho_attempt(n, c, max_iter, &status, m);
        if (status == 1)
            return g;
        if (status == 0) {
            *gave_up = 1;
            return 0;
        }
        /* aborted: retry with next constant */
    }
    /* deterministic fallback: unbounded attempts */
    for (u64 c = 64;; c++) {
        int status;
        u128 g = rho_attempt(n, c, 0, &status, m);
        if (status == 1)
            return g;
    }
}

/* ---------------- factorization driver ---------------- */

typedef struct {
    u128 p;
    int e;
    int kind; /* 0 prime, 1 squarefree atom (two distinct primes > cbrt) */
} part;

#define MAX_PARTS 160

typedef struct {
    u128 v;
    int e;
} work_item;

static int factor_u128(u128 n, int mode, part *out)
{
    int n_out = 0;
    for (int i = 0; i < n_small_primes && n > 1; i++) {
        u32 p = small_primes[i];
        if ((u128)p * p > n)
            break;
        if (n % p == 0) {
            int e = 0;
            do {
                n /= p;
                e++;
            } while (n % p == 0);
            out[n_out].p = p;
            out[n_out].e = e;
            out[n_out].kind = 0;
            n_out++;
        }
    }
    if (n == 1)
        return n_out;
    if (n <= (u128)TRIAL_BOUND * TRIAL_BOUND) {
        /* no factor <= sqrt: prime */
        out[n_out].p = n;
        out[n_out].e = 1;
        out[n_out].kind = 0;
        return n_out + 1;
    }
    work_item stack[200];
    int top = 0;
    stack[top].v = n;
    stack[top].e = 1;
    top++;
    while (top > 0) {
        top--;
        u128 m = stack[top].v;
        int e = stack[top].e;
        if (m == 1)
            continue;
        if (is_prime_u128(m)) {
            out[n_out].p = m;
            out[n_out].e = e;
            out[n_out].kind = 0;
            n_out++;
            if (n_out >= MAX_PARTS)
                return -1;
            continue;
        }
        /* perfect power? */
        {
            int found_pow = 0;
            for (int k = 2; k <= 7; k += (k == 2 ? 1 : 2)) {
                if (bits_u128(m) < k)
                    break;
                u64 rt = k == 2 ? isqrt_u128(m) : iroot_u128(m, k);
                u128 pw = 1;
                for (int i = 0; i < k; i++)
                    pw *= rt;
                if (pw == m && rt > 1) {
                    stack[top].v = rt;
                    stack[top].e = e * k;
                    top++;
                    found_pow = 1;
                    break;
                }
            }
            if (found_pow)
                continue;
        }
        mont mm;
        mont_init(&mm, m);
        int gave_up = 0;
        u128 d = rho_factor(m, mode == 1, &gave_up, &mm);
        if (gave_up) {
            /* composite, not a perfect power, no prime factor <= cbrt(m):
             * necessarily a product of two distinct primes */
            out[n_out].p = m;
            out[n_out].e = e;
            out[n_out].kind = 1;
            n_out++;
            if (n_out >= MAX_PARTS)
                return -1;
            continue;
        }
        stack[top].v = d;
        stack[top].e = e;
        top++;
        stack[top].v = m / d;
        stack[top].e = e;
        top++;
        if (top >= 198)
            return -1;
    }
    return n_out;
}

/* ---------------- Python bindings ---------------- */

static u128 args_to_u128(unsigned long long hi, unsigned long long lo)
{
    return ((u128)hi << 64) | lo;
}

static PyObject *py_factor(PyObject *self, PyObject *args)
{
    unsigned long long hi, lo;
    int mode = 0;
    if (!PyArg_ParseTuple(args, "KK|i", &hi, &lo, &mode))
        return NULL;
    u128 n = args_to_u128(hi, lo);
    if (n == 0) {
        PyErr_SetString(PyExc_ValueError, "cannot factor 0");
        return NULL;
    }
    if (bits_u128(n) > MAX_BITS) {
        PyErr_SetString(PyExc_OverflowError, "input exceeds 94 bits");
        return NULL;
    }
    part parts[MAX_PARTS];
    int n_parts;
    Py_BEGIN_ALLOW_THREADS
    n_parts = factor_u128(n, mode, parts);
    Py_END_ALLOW_THREADS
    if (n_parts < 0) {
        PyErr_SetString(PyExc_RuntimeError, "factorization overflowed internal buffers");
        return NULL;
    }
    /* merge duplicates (same prime found on different branches) */
    for (int i = 0; i < n_parts; i++) {
        if (parts[i].e == 0)
            continue;
        for (int j = i + 1; j < n_parts; j++) {
            if (parts[j].e && parts[j].p == parts[i].p && parts[j].kind == parts[i].kind) {
                parts[i].e += parts[j].e;
                parts[j].e = 0;
            }
        }
    }
    PyObject *list = PyList_New(0);
    if (!list)
        return NULL;
    for (int i = 0; i < n_parts; i++) {
        if (parts[i].e == 0)
            continue;
        PyObject *t = Py_BuildValue(
            "KKii", (unsigned long long)(parts[i].p >> 64),
            (unsigned long long)(u64)parts[i].p, parts[i].e, parts[i].kind);
        if (!t || PyList_Append(list, t) < 0) {
            Py_XDECREF(t);
            Py_DECREF(list);
            return NULL;
        }
        Py_DECREF(t);
    }
    return list;
}

static PyObject *py_is_prime(PyObject *self, PyObject *args)
{
    unsigned long long hi, lo;
    if (!PyArg_ParseTuple(args, "KK", &hi, &lo))
        return NULL;
    u128 n = args_to_u128(hi, lo);
    if (bits_u128(n) > MAX_BITS) {
        PyErr_SetString(PyExc_OverflowError, "input exceeds 94 bits");
        return NULL;
    }
    int r;
    Py_BEGIN_ALLOW_THREADS
    r = is_prime_u128(n);
    Py_END_ALLOW_THREADS
    return PyBool_FromLong(r);
}

static PyMethodDef methods[] = {
    {"factor", py_factor, METH_VARARGS,
     "factor(hi, lo, mode=0) -> list of (p_hi, p_lo, exponent, kind)\n"
     "kind 0: certified prime; kind 1: product of two distinct primes\n"
     "(only in mode 1, both above the cube root of the part)."},
    {"is_prime", py_is_prime, METH_VARARGS, "is_prime(hi, lo) -> bool"},
    {NULL, NULL, 0, NULL},
};

static struct PyModuleDef module = {
    PyModuleDef_HEAD_INIT, "_fastfactor", "fixed-width factorization fast path", -1, methods,
};

PyMODINIT_FUNC PyInit__fastfactor(void)
{
    init_small_primes();
    return PyModule_Create(&module);
}
