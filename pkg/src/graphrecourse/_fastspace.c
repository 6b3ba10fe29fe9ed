/* Fast native core for edit-space exploration.
 *
 * Implements the hot path of the walk: Weisfeiler-Lehman color refinement
 * with a process-global interned palette of structure-stable 128-bit color
 * hashes, canonical keys (exact canonicalization below the cap, WL digest
 * above), WL feature-hash embeddings, one-shot edit-neighborhood expansion,
 * and labeled subgraph monomorphism.  The Python modules implement the same
 * algorithms over the same hash primitive (exposed here as h128/h64_salted),
 * so both backends produce byte-identical keys and embeddings; the Python
 * side stays the reference implementation in tests.
 */

#define PY_SSIZE_T_CLEAN
#include <Python.h>
#include <stdint.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

/* ------------------------------------------------------------------ */
/* MurmurHash3 x64 128-bit (Austin Appleby, public domain)            */
/* ------------------------------------------------------------------ */

static inline uint64_t rotl64(uint64_t x, int8_t r) {
    return (x << r) | (x >> (64 - r));
}

static inline uint64_t fmix64(uint64_t k) {
    k ^= k >> 33;
    k *= 0xff51afd7ed558ccdULL;
    k ^= k >> 33;
    k *= 0xc4ceb9fe1a85ec53ULL;
    k ^= k >> 33;
    return k;
}

static inline uint64_t load64(const uint8_t *p) {
    uint64_t v;
    memcpy(&v, p, 8);
    return v;
}

static void murmur128(const uint8_t *data, size_t len, uint8_t out[16]) {
    const size_t nblocks = len / 16;
    uint64_t h1 = 0, h2 = 0;
    const uint64_t c1 = 0x87c37b91114253d5ULL;
    const uint64_t c2 = 0x4cf5ad432745937fULL;

    for (size_t i = 0; i < nblocks; i++) {
        uint64_t k1 = load64(data + i * 16);
        uint64_t k2 = load64(data + i * 16 + 8);
        k1 *= c1; k1 = rotl64(k1, 31); k1 *= c2; h1 ^= k1;
        h1 = rotl64(h1, 27); h1 += h2; h1 = h1 * 5 + 0x52dce729;
        k2 *= c2; k2 = rotl64(k2, 33); k2 *= c1; h2 ^= k2;
        h2 = rotl64(h2, 31); h2 += h1; h2 = h2 * 5 + 0x38495ab5;
    }

    const uint8_t *tail = data + nblocks * 16;
    uint64_t k1 = 0, k2 = 0;
    switch (len & 15) {
    case 15: k2 ^= ((uint64_t)tail[14]) << 48; /* fallthrough */
    case 14: k2 ^= ((uint64_t)tail[13]) << 40; /* fallthrough */
    case 13: k2 ^= ((uint64_t)tail[12]) << 32; /* fallthrough */
    case 12: k2 ^= ((uint64_t)tail[11]) << 24; /* fallthrough */
    case 11: k2 ^= ((uint64_t)tail[10]) << 16; /* fallthrough */
    case 10: k2 ^= ((uint64_t)tail[9]) << 8;   /* fallthrough */
    case 9:  k2 ^= ((uint64_t)tail[8]);
             k2 *= c2; k2 = rotl64(k2, 33); k2 *= c1; h2 ^= k2;
             /* fallthrough */
    case 8:  k1 ^= ((uint64_t)tail[7]) << 56;  /* fallthrough */
    case 7:  k1 ^= ((uint64_t)tail[6]) << 48;  /* fallthrough */
    case 6:  k1 ^= ((uint64_t)tail[5]) << 40;  /* fallthrough */
    case 5:  k1 ^= ((uint64_t)tail[4]) << 32;  /* fallthrough */
    case 4:  k1 ^= ((uint64_t)tail[3]) << 24;  /* fallthrough */
    case 3:  k1 ^= ((uint64_t)tail[2]) << 16;  /* fallthrough */
    case 2:  k1 ^= ((uint64_t)tail[1]) << 8;   /* fallthrough */
    case 1:  k1 ^= ((uint64_t)tail[0]);
             k1 *= c1; k1 = rotl64(k1, 31); k1 *= c2; h1 ^= k1;
    }

    h1 ^= len; h2 ^= len;
    h1 += h2; h2 += h1;
    h1 = fmix64(h1); h2 = fmix64(h2);
    h1 += h2; h2 += h1;
    memcpy(out, &h1, 8);
    memcpy(out + 8, &h2, 8);
}

/* Big-endian uint64 of the first 8 digest bytes, matching
 * int.from_bytes(h[:8], "big") on the Python side. */
static uint64_t digest_to_u64be(const uint8_t out[16]) {
    uint64_t x = 0;
    for (int i = 0; i < 8; i++) x = (x << 8) | out[i];
    return x;
}

static uint64_t h64_salted_raw(const uint8_t *data, size_t dlen,
                               const uint8_t *salt, size_t slen) {
    /* hash of salt || 0x00 || data */
    static uint8_t *buf = NULL;
    static size_t bufcap = 0;
    size_t need = slen + 1 + dlen;
    if (need > bufcap) {
        bufcap = need * 2 + 64;
        buf = (uint8_t *)realloc(buf, bufcap);
    }
    memcpy(buf, salt, slen);
    buf[slen] = 0;
    memcpy(buf + slen + 1, data, dlen);
    uint8_t out[16];
    murmur128(buf, need, out);
    return digest_to_u64be(out);
}

/* ------------------------------------------------------------------ */
/* Label registry (persists across palette resets)                    */
/* ------------------------------------------------------------------ */

typedef struct {
    char *name;
    Py_ssize_t len;
    uint8_t hash[16];   /* h128(b"L:" + name) */
    uint32_t color;     /* cached palette color */
    uint64_t epoch;     /* epoch the cached color belongs to */
} LabelEntry;

static LabelEntry *g_labels = NULL;
static int g_nlabels = 0, g_labels_cap = 0;

/* ------------------------------------------------------------------ */
/* Palette: interned stable color hashes                              */
/* ------------------------------------------------------------------ */

typedef struct {
    uint8_t (*stable)[16];  /* stable[color] = 16-byte structure hash */
    size_t n, alloc;
    uint32_t *slots;        /* open addressing; value = color + 1, 0 empty */
    size_t nslots;          /* power of two */
} Palette;

static Palette g_pal = {NULL, 0, 0, NULL, 0};
static uint64_t g_epoch = 1;
static uint64_t g_resets = 0;
static size_t g_palette_cap = 8000000;

static void palette_free(void) {
    free(g_pal.stable); free(g_pal.slots);
    g_pal.stable = NULL; g_pal.slots = NULL;
    g_pal.n = g_pal.alloc = g_pal.nslots = 0;
}

static int palette_grow_table(void) {
    size_t newsize = g_pal.nslots ? g_pal.nslots * 2 : 1 << 16;
    uint32_t *ns = (uint32_t *)calloc(newsize, sizeof(uint32_t));
    if (!ns) return -1;
    for (size_t i = 0; i < g_pal.nslots; i++) {
        uint32_t v = g_pal.slots[i];
        if (!v) continue;
        uint64_t h = load64(g_pal.stable[v - 1]);
        size_t j = h & (newsize - 1);
        while (ns[j]) j = (j + 1) & (newsize - 1);
        ns[j] = v;
    }
    free(g_pal.slots);
    g_pal.slots = ns;
    g_pal.nslots = newsize;
    return 0;
}

static uint32_t intern_stable(const uint8_t h[16]) {
    if (g_pal.n * 10 >= g_pal.nslots * 7) {
        if (palette_grow_table() < 0) return UINT32_MAX;
    }
    uint64_t hh = load64(h);
    size_t mask = g_pal.nslots - 1;
    size_t j = hh & mask;
    while (g_pal.slots[j]) {
        uint32_t c = g_pal.slots[j] - 1;
        if (memcmp(g_pal.stable[c], h, 16) == 0) return c;
        j = (j + 1) & mask;
    }
    if (g_pal.n >= g_pal.alloc) {
        size_t na = g_pal.alloc ? g_pal.alloc * 2 : 1 << 15;
        void *p = realloc(g_pal.stable, na * 16);
        if (!p) return UINT32_MAX;
        g_pal.stable = (uint8_t (*)[16])p;
        g_pal.alloc = na;
    }
    uint32_t c = (uint32_t)g_pal.n++;
    memcpy(g_pal.stable[c], h, 16);
    g_pal.slots[j] = c + 1;
    return c;
}

static void maybe_reset(void) {
    if (g_pal.n > g_palette_cap) {
        palette_free();
        g_epoch++;
        g_resets++;
    }
}

static uint32_t label_color(int lid) {
    LabelEntry *e = &g_labels[lid];
    if (e->epoch != g_epoch) {
        e->color = intern_stable(e->hash);
        e->epoch = g_epoch;
    }
    return e->color;
}

/* ------------------------------------------------------------------ */
/* Bucket cache for the feature-hash embedding (per salt)             */
/* ------------------------------------------------------------------ */

typedef struct {
    uint8_t salt[16];
    size_t salt_len;
    uint64_t *keys;     /* (color << 3) | t, plus 1 to keep 0 as empty */
    uint32_t *vals;     /* bucket | (sign << 16); sign bit: 1 = +1   */
    size_t nslots, count;
    uint64_t epoch;
    int dim;
} BucketTab;

static BucketTab *g_btabs = NULL;
static int g_nbtabs = 0;

static BucketTab *bucket_tab(const uint8_t *salt, size_t slen, int dim) {
    for (int i = 0; i < g_nbtabs; i++) {
        if (g_btabs[i].salt_len == slen && g_btabs[i].dim == dim
                && memcmp(g_btabs[i].salt, salt, slen) == 0)
            return &g_btabs[i];
    }
    g_btabs = (BucketTab *)realloc(g_btabs, (g_nbtabs + 1) * sizeof(BucketTab));
    BucketTab *t = &g_btabs[g_nbtabs++];
    memset(t, 0, sizeof(*t));
    memcpy(t->salt, salt, slen);
    t->salt_len = slen;
    t->dim = dim;
    t->epoch = 0;
    return t;
}

static void btab_clear(BucketTab *t) {
    free(t->keys); free(t->vals);
    t->keys = NULL; t->vals = NULL;
    t->nslots = t->count = 0;
}

static void btab_grow(BucketTab *t) {
    size_t newsize = t->nslots ? t->nslots * 2 : 1 << 14;
    uint64_t *nk = (uint64_t *)calloc(newsize, sizeof(uint64_t));
    uint32_t *nv = (uint32_t *)calloc(newsize, sizeof(uint32_t));
    for (size_t i = 0; i < t->nslots; i++) {
        if (!t->keys[i]) continue;
        size_t j = (t->keys[i] * 0x9e3779b97f4a7c15ULL) & (newsize - 1);
        while (nk[j]) j = (j + 1) & (newsize - 1);
        nk[j] = t->keys[i];
        nv[j] = t->vals[i];
    }
    free(t->keys); free(t->vals);
    t->keys = nk; t->vals = nv; t->nslots = newsize;
}

static uint32_t bucket_of(BucketTab *t, int round, uint32_t color) {
    if (t->epoch != g_epoch) {
        btab_clear(t);
        t->epoch = g_epoch;
    }
    if (t->count * 10 >= t->nslots * 7) btab_grow(t);
    uint64_t key = (((uint64_t)color << 3) | (uint64_t)round) + 1;
    size_t mask = t->nslots - 1;
    size_t j = (key * 0x9e3779b97f4a7c15ULL) & mask;
    while (t->keys[j]) {
        if (t->keys[j] == key) return t->vals[j];
        j = (j + 1) & mask;
    }
    /* payload "%d:" + stable; hash with salt prefix */
    uint8_t payload[24 + 16];
    int plen = snprintf((char *)payload, 24, "%d:", round);
    memcpy(payload + plen, g_pal.stable[color], 16);
    uint64_t x = h64_salted_raw(payload, plen + 16, t->salt, t->salt_len);
    uint32_t bucket = (uint32_t)(x % (uint64_t)t->dim);
    uint32_t sign = (uint32_t)((x >> 40) & 1);
    uint32_t val = bucket | (sign << 16);
    t->keys[j] = key;
    t->vals[j] = val;
    t->count++;
    return val;
}

/* ------------------------------------------------------------------ */
/* Graph scratch representation                                       */
/* ------------------------------------------------------------------ */

#define MAX_ROUNDS 8

typedef struct {
    int n, m;
    uint16_t *lab;          /* label ids */
    uint16_t (*edges)[2];   /* normalized (u < v), sorted ascending */
    int *adjoff;            /* CSR offsets, length n+1 */
    uint16_t *adjlist;      /* CSR neighbor list, length 2m */
} CG;

/* growable scratch buffers, reused across calls */
static uint8_t *g_scratch = NULL;
static size_t g_scratch_cap = 0;

static void *scratch(size_t need) {
    if (need > g_scratch_cap) {
        g_scratch_cap = need * 2 + 1024;
        g_scratch = (uint8_t *)realloc(g_scratch, g_scratch_cap);
    }
    return g_scratch;
}

static void build_adj(CG *g, int *adjoff, uint16_t *adjlist) {
    int n = g->n, m = g->m;
    memset(adjoff, 0, (n + 1) * sizeof(int));
    for (int i = 0; i < m; i++) {
        adjoff[g->edges[i][0] + 1]++;
        adjoff[g->edges[i][1] + 1]++;
    }
    for (int u = 0; u < n; u++) adjoff[u + 1] += adjoff[u];
    int *fill = (int *)alloca((n > 0 ? n : 1) * sizeof(int));
    memcpy(fill, adjoff, n * sizeof(int));
    for (int i = 0; i < m; i++) {
        uint16_t u = g->edges[i][0], v = g->edges[i][1];
        adjlist[fill[u]++] = v;
        adjlist[fill[v]++] = u;
    }
    g->adjoff = adjoff;
    g->adjlist = adjlist;
}

/* WL refinement: fills colors[r][u] for r = 0..rounds.  Returns 0, or -1
 * on allocation failure. */
static int wl_colors(const CG *g, int rounds, uint32_t *colors /* (rounds+1)*n */) {
    int n = g->n;
    for (int u = 0; u < n; u++)
        colors[u] = label_color(g->lab[u]);
    uint8_t msg[2 + 16 * 256];
    const uint8_t *nbh[256];
    for (int r = 1; r <= rounds; r++) {
        const uint32_t *cur = colors + (size_t)(r - 1) * n;
        uint32_t *nxt = colors + (size_t)r * n;
        for (int u = 0; u < n; u++) {
            int deg = g->adjoff[u + 1] - g->adjoff[u];
            if (deg > 256) return -1;
            for (int i = 0; i < deg; i++)
                nbh[i] = g_pal.stable[cur[g->adjlist[g->adjoff[u] + i]]];
            /* insertion sort of 16-byte hash pointers */
            for (int i = 1; i < deg; i++) {
                const uint8_t *x = nbh[i];
                int j = i - 1;
                while (j >= 0 && memcmp(nbh[j], x, 16) > 0) {
                    nbh[j + 1] = nbh[j];
                    j--;
                }
                nbh[j + 1] = x;
            }
            msg[0] = 'N'; msg[1] = ':';
            memcpy(msg + 2, g_pal.stable[cur[u]], 16);
            for (int i = 0; i < deg; i++)
                memcpy(msg + 18 + 16 * i, nbh[i], 16);
            uint8_t h[16];
            murmur128(msg, 18 + 16 * (size_t)deg, h);
            uint32_t c = intern_stable(h);
            if (c == UINT32_MAX) return -1;
            nxt[u] = c;
        }
    }
    return 0;
}

static int cmp16(const void *a, const void *b) {
    return memcmp(a, b, 16);
}

/* W digest matching the Python reference: h128(b"%d;%d;" + sorted stables) */
static void wl_digest_key(const CG *g, const uint32_t *final, uint8_t *key_out,
                          Py_ssize_t *key_len) {
    int n = g->n;
    uint8_t *buf = (uint8_t *)scratch(32 + 16 * (size_t)n);
    int hl = snprintf((char *)buf, 32, "%d;%d;", n, g->m);
    uint8_t *hashes = buf + hl;
    for (int u = 0; u < n; u++)
        memcpy(hashes + 16 * u, g_pal.stable[final[u]], 16);
    qsort(hashes, n, 16, cmp16);
    uint8_t d[16];
    murmur128(buf, hl + 16 * (size_t)n, d);
    key_out[0] = 'W'; key_out[1] = ':';
    memcpy(key_out + 2, d, 16);
    *key_len = 18;
}

/* ------------------------------------------------------------------ */
/* Exact canonicalization (port of the Python reference)              */
/* ------------------------------------------------------------------ */

#define MAX_EXACT 32

typedef struct {
    const CG *g;
    int n;
    uint8_t *best;       /* best encoding so far */
    Py_ssize_t best_len; /* -1 if none */
    uint8_t *enc;        /* scratch encoding buffer */
    size_t enc_cap;
} CanonCtx;

/* Python-tuple comparison of sigs: elementwise, then shorter < longer. */
static int sig_cmp(const uint32_t *a, int la, const uint32_t *b, int lb) {
    int l = la < lb ? la : lb;
    for (int i = 0; i < l; i++) {
        if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
    }
    if (la != lb) return la < lb ? -1 : 1;
    return 0;
}

/* Iterate (color, sorted neighbor colors) signatures; ranks are positions
 * in the sorted distinct-signature list; stop at the fixpoint. */
static void canon_refine(const CG *g, uint32_t *colors) {
    int n = g->n;
    uint32_t sigbuf[MAX_EXACT * (MAX_EXACT + 1)];
    uint32_t *sigs[MAX_EXACT];
    int siglen[MAX_EXACT];
    int order[MAX_EXACT];
    uint32_t newc[MAX_EXACT];
    for (;;) {
        for (int u = 0; u < n; u++) {
            uint32_t *s = sigbuf + u * (MAX_EXACT + 1);
            int deg = g->adjoff[u + 1] - g->adjoff[u];
            s[0] = colors[u];
            for (int i = 0; i < deg; i++)
                s[1 + i] = colors[g->adjlist[g->adjoff[u] + i]];
            /* insertion sort of neighbor colors */
            for (int i = 2; i <= deg; i++) {
                uint32_t x = s[i];
                int j = i - 1;
                while (j >= 1 && s[j] > x) { s[j + 1] = s[j]; j--; }
                s[j + 1] = x;
            }
            sigs[u] = s;
            siglen[u] = deg + 1;
            order[u] = u;
        }
        /* insertion sort node indices by sig */
        for (int i = 1; i < n; i++) {
            int x = order[i];
            int j = i - 1;
            while (j >= 0 && sig_cmp(sigs[order[j]], siglen[order[j]],
                                     sigs[x], siglen[x]) > 0) {
                order[j + 1] = order[j];
                j--;
            }
            order[j + 1] = x;
        }
        /* rank distinct sigs */
        int rank = 0;
        newc[order[0]] = 0;
        for (int i = 1; i < n; i++) {
            if (sig_cmp(sigs[order[i - 1]], siglen[order[i - 1]],
                        sigs[order[i]], siglen[order[i]]) != 0)
                rank++;
            newc[order[i]] = (uint32_t)rank;
        }
        int same = 1;
        for (int u = 0; u < n; u++)
            if (newc[u] != colors[u]) { same = 0; break; }
        if (same) return;
        memcpy(colors, newc, n * sizeof(uint32_t));
    }
}

/* Encoding identical to the Python reference:
 * "{n};{labels joined ','};{[(a, b), ...]}"                         */
static Py_ssize_t canon_encode(CanonCtx *ctx, const int *order) {
    const CG *g = ctx->g;
    int n = ctx->n;
    int rank[MAX_EXACT];
    for (int i = 0; i < n; i++) rank[order[i]] = i;
    size_t need = 32;
    for (int i = 0; i < n; i++) need += g_labels[g->lab[order[i]]].len + 1;
    need += 4 + (size_t)g->m * 16;
    if (need > ctx->enc_cap) {
        ctx->enc_cap = need * 2;
        ctx->enc = (uint8_t *)realloc(ctx->enc, ctx->enc_cap);
    }
    uint8_t *p = ctx->enc;
    p += snprintf((char *)p, 32, "%d;", n);
    for (int i = 0; i < n; i++) {
        if (i) *p++ = ',';
        LabelEntry *e = &g_labels[g->lab[order[i]]];
        memcpy(p, e->name, e->len);
        p += e->len;
    }
    *p++ = ';';
    /* sorted edge bits under the ordering */
    int bits[MAX_EXACT * MAX_EXACT / 2][2];
    int nb = 0;
    for (int i = 0; i < g->m; i++) {
        int a = rank[g->edges[i][0]], b = rank[g->edges[i][1]];
        if (a > b) { int t = a; a = b; b = t; }
        bits[nb][0] = a; bits[nb][1] = b; nb++;
    }
    for (int i = 1; i < nb; i++) {
        int a0 = bits[i][0], a1 = bits[i][1];
        int j = i - 1;
        while (j >= 0 && (bits[j][0] > a0 || (bits[j][0] == a0 && bits[j][1] > a1))) {
            bits[j + 1][0] = bits[j][0];
            bits[j + 1][1] = bits[j][1];
            j--;
        }
        bits[j + 1][0] = a0; bits[j + 1][1] = a1;
    }
    *p++ = '[';
    for (int i = 0; i < nb; i++) {
        if (i) { *p++ = ','; *p++ = ' '; }
        p += snprintf((char *)p, 24, "(%d, %d)", bits[i][0], bits[i][1]);
    }
    *p++ = ']';
    return (Py_ssize_t)(p - ctx->enc);
}

static void canon_search(CanonCtx *ctx, uint32_t *colors) {
    const CG *g = ctx->g;
    int n = ctx->n;
    canon_refine(g, colors);
    /* find the smallest color whose cell has > 1 node */
    int count[MAX_EXACT];
    memset(count, 0, sizeof(int) * n);
    for (int u = 0; u < n; u++) count[colors[u]]++;
    int target_color = -1;
    for (int c = 0; c < n; c++) {
        if (count[c] > 1) { target_color = c; break; }
        if (count[c] == 0) break;  /* colors are dense ranks */
    }
    if (target_color < 0) {
        /* discrete: order nodes by color */
        int order[MAX_EXACT];
        for (int u = 0; u < n; u++) order[colors[u]] = u;
        Py_ssize_t len = canon_encode(ctx, order);
        if (ctx->best_len < 0) {
            memcpy(ctx->best, ctx->enc, len);
            ctx->best_len = len;
        } else {
            Py_ssize_t ml = len < ctx->best_len ? len : ctx->best_len;
            int c = memcmp(ctx->enc, ctx->best, ml);
            if (c < 0 || (c == 0 && len < ctx->best_len)) {
                memcpy(ctx->best, ctx->enc, len);
                ctx->best_len = len;
            }
        }
        return;
    }
    uint32_t fresh = 0;
    for (int u = 0; u < n; u++) if (colors[u] > fresh) fresh = colors[u];
    fresh++;
    uint32_t branch[MAX_EXACT];
    for (int u = 0; u < n; u++) {
        if (colors[u] != (uint32_t)target_color) continue;
        memcpy(branch, colors, n * sizeof(uint32_t));
        branch[u] = fresh;
        canon_search(ctx, branch);
    }
}

static int exact_key(const CG *g, const uint32_t *final, uint8_t **key_out,
                     Py_ssize_t *key_len) {
    int n = g->n;
    /* seed: rank distinct final colors by stable hash bytes */
    uint32_t distinct[MAX_EXACT];
    int nd = 0;
    for (int u = 0; u < n; u++) {
        int found = 0;
        for (int i = 0; i < nd; i++)
            if (distinct[i] == final[u]) { found = 1; break; }
        if (!found) distinct[nd++] = final[u];
    }
    for (int i = 1; i < nd; i++) {
        uint32_t x = distinct[i];
        int j = i - 1;
        while (j >= 0 && memcmp(g_pal.stable[distinct[j]], g_pal.stable[x], 16) > 0) {
            distinct[j + 1] = distinct[j];
            j--;
        }
        distinct[j + 1] = x;
    }
    uint32_t colors[MAX_EXACT];
    for (int u = 0; u < n; u++) {
        for (int i = 0; i < nd; i++)
            if (distinct[i] == final[u]) { colors[u] = (uint32_t)i; break; }
    }
    static uint8_t *bestbuf = NULL;
    static size_t bestcap = 0;
    size_t need = 64;
    for (int u = 0; u < n; u++) need += g_labels[g->lab[u]].len + 1;
    need += (size_t)g->m * 16 + 16;
    if (need + 2 > bestcap) {
        bestcap = (need + 2) * 2;
        bestbuf = (uint8_t *)realloc(bestbuf, bestcap);
    }
    CanonCtx ctx;
    ctx.g = g; ctx.n = n;
    ctx.best = bestbuf + 2;
    ctx.best_len = -1;
    ctx.enc = NULL; ctx.enc_cap = 0;
    ctx.enc = (uint8_t *)malloc(need);
    ctx.enc_cap = need;
    canon_search(&ctx, colors);
    free(ctx.enc);
    bestbuf[0] = 'X'; bestbuf[1] = ':';
    *key_out = bestbuf;
    *key_len = ctx.best_len + 2;
    return 0;
}

/* ------------------------------------------------------------------ */
/* Embedding accumulation                                             */
/* ------------------------------------------------------------------ */

static void embed_from_colors(const CG *g, const uint32_t *colors, int rounds,
                              BucketTab *bt, double scale, double *out) {
    int n = g->n, dim = bt->dim;
    for (int i = 0; i < dim; i++) out[i] = 0.0;
    for (int r = 0; r <= rounds; r++) {
        const uint32_t *cur = colors + (size_t)r * n;
        for (int u = 0; u < n; u++) {
            uint32_t val = bucket_of(bt, r, cur[u]);
            uint32_t bucket = val & 0xffff;
            out[bucket] += (val & 0x10000) ? 1.0 : -1.0;
        }
    }
    double factor = scale / (double)(n + g->m + 1);
    for (int i = 0; i < dim; i++) out[i] *= factor;
}

/* ------------------------------------------------------------------ */
/* Shared graph parsing from Python buffers                           */
/* ------------------------------------------------------------------ */

/* labels: bytes of uint16 LE; edges: bytes of uint16 LE pairs */
static int parse_graph(Py_buffer *labels, Py_buffer *edges, CG *g,
                       uint16_t **labbuf, uint16_t (**edgebuf)[2]) {
    g->n = (int)(labels->len / 2);
    g->m = (int)(edges->len / 4);
    *labbuf = (uint16_t *)labels->buf;
    *edgebuf = (uint16_t (*)[2])edges->buf;
    g->lab = *labbuf;
    g->edges = *edgebuf;
    for (int i = 0; i < g->n; i++)
        if (g->lab[i] >= g_nlabels) return -1;
    return 0;
}

/* Compute key [+ optional embedding] for one already-built CG whose
 * adjacency has been filled.  colors buffer must hold (rounds+1)*n. */
static int analyze_cg(const CG *g, int rounds, int exact_cap, BucketTab *bt,
                      double scale, uint32_t *colors,
                      uint8_t **key, Py_ssize_t *key_len, double *vec) {
    if (wl_colors(g, rounds, colors) < 0) return -1;
    const uint32_t *final = colors + (size_t)rounds * g->n;
    if (g->n <= exact_cap && g->n <= MAX_EXACT) {
        if (exact_key(g, final, key, key_len) < 0) return -1;
    } else {
        static uint8_t wkey[18];
        wl_digest_key(g, final, wkey, key_len);
        *key = wkey;
    }
    if (vec) embed_from_colors(g, colors, rounds, bt, scale, vec);
    return 0;
}

/* ------------------------------------------------------------------ */
/* Python-facing functions                                            */
/* ------------------------------------------------------------------ */

static PyObject *fs_h128(PyObject *self, PyObject *arg) {
    Py_buffer b;
    if (PyObject_GetBuffer(arg, &b, PyBUF_SIMPLE) < 0) return NULL;
    uint8_t out[16];
    murmur128((const uint8_t *)b.buf, (size_t)b.len, out);
    PyBuffer_Release(&b);
    return PyBytes_FromStringAndSize((const char *)out, 16);
}

static PyObject *fs_h64_salted(PyObject *self, PyObject *args) {
    Py_buffer d, s;
    if (!PyArg_ParseTuple(args, "y*y*", &d, &s)) return NULL;
    uint64_t x = h64_salted_raw((const uint8_t *)d.buf, (size_t)d.len,
                                (const uint8_t *)s.buf, (size_t)s.len);
    PyBuffer_Release(&d);
    PyBuffer_Release(&s);
    return PyLong_FromUnsignedLongLong(x);
}

static PyObject *fs_label_id(PyObject *self, PyObject *arg) {
    Py_buffer b;
    if (PyObject_GetBuffer(arg, &b, PyBUF_SIMPLE) < 0) return NULL;
    for (int i = 0; i < g_nlabels; i++) {
        if (g_labels[i].len == b.len
                && memcmp(g_labels[i].name, b.buf, b.len) == 0) {
            PyBuffer_Release(&b);
            return PyLong_FromLong(i);
        }
    }
    if (g_nlabels >= g_labels_cap) {
        g_labels_cap = g_labels_cap ? g_labels_cap * 2 : 16;
        g_labels = (LabelEntry *)realloc(g_labels, g_labels_cap * sizeof(LabelEntry));
    }
    LabelEntry *e = &g_labels[g_nlabels];
    e->name = (char *)malloc(b.len ? b.len : 1);
    memcpy(e->name, b.buf, b.len);
    e->len = b.len;
    uint8_t *payload = (uint8_t *)scratch(2 + b.len);
    payload[0] = 'L'; payload[1] = ':';
    memcpy(payload + 2, b.buf, b.len);
    murmur128(payload, 2 + (size_t)b.len, e->hash);
    e->epoch = 0;
    PyBuffer_Release(&b);
    return PyLong_FromLong(g_nlabels++);
}

static PyObject *fs_analyze(PyObject *self, PyObject *args) {
    Py_buffer labels, edges, salt;
    int rounds, exact_cap, dim, want_vec;
    double scale;
    if (!PyArg_ParseTuple(args, "y*y*iiiy*dp", &labels, &edges, &rounds,
                          &exact_cap, &dim, &salt, &scale, &want_vec))
        return NULL;
    CG g;
    uint16_t *labbuf;
    uint16_t (*edgebuf)[2];
    if (parse_graph(&labels, &edges, &g, &labbuf, &edgebuf) < 0) {
        PyBuffer_Release(&labels); PyBuffer_Release(&edges); PyBuffer_Release(&salt);
        PyErr_SetString(PyExc_ValueError, "unregistered label id");
        return NULL;
    }
    maybe_reset();
    if (rounds > MAX_ROUNDS) rounds = MAX_ROUNDS;
    int *adjoff = (int *)malloc((g.n + 1) * sizeof(int));
    uint16_t *adjlist = (uint16_t *)malloc((2 * g.m + 1) * sizeof(uint16_t));
    build_adj(&g, adjoff, adjlist);
    uint32_t *colors = (uint32_t *)malloc((size_t)(rounds + 1) * g.n * sizeof(uint32_t) + 4);
    BucketTab *bt = bucket_tab((const uint8_t *)salt.buf, (size_t)salt.len, dim);
    double *vec = want_vec ? (double *)malloc(dim * sizeof(double)) : NULL;
    uint8_t *key;
    Py_ssize_t key_len;
    int rc = analyze_cg(&g, rounds, exact_cap, bt, scale, colors, &key, &key_len, vec);
    PyObject *result = NULL;
    if (rc == 0) {
        PyObject *kb = PyBytes_FromStringAndSize((const char *)key, key_len);
        PyObject *vb = want_vec
            ? PyBytes_FromStringAndSize((const char *)vec, dim * sizeof(double))
            : (Py_INCREF(Py_None), Py_None);
        result = PyTuple_Pack(2, kb, vb);
        Py_XDECREF(kb);
        Py_XDECREF(vb);
    } else {
        PyErr_SetString(PyExc_RuntimeError, "refinement failed (degree > 256?)");
    }
    free(adjoff); free(adjlist); free(colors); free(vec);
    PyBuffer_Release(&labels); PyBuffer_Release(&edges); PyBuffer_Release(&salt);
    return result;
}

/* --- labeled subgraph monomorphism ---------------------------------- */

typedef struct {
    int gn;
    const uint16_t *glab;
    const int *gadjoff;
    const uint16_t *gadjlist;
    uint8_t (*gadj)[256];    /* adjacency matrix bitset-ish (byte) */
    int mn;
    const int *morder;       /* motif visit order */
    const uint16_t *mlab_ord;
    const int *mback_off;
    const int *mback;        /* indices into image[] that must be adjacent */
    uint8_t *used;
    int *image;
} MotifCtx;

static int motif_extend(MotifCtx *c, int i) {
    if (i == c->mn) return 1;
    int nb = c->mback_off[i + 1] - c->mback_off[i];
    if (nb == 0) {
        for (int v = 0; v < c->gn; v++) {
            if (c->used[v] || c->glab[v] != c->mlab_ord[i]) continue;
            c->used[v] = 1; c->image[i] = v;
            if (motif_extend(c, i + 1)) return 1;
            c->used[v] = 0;
        }
        return 0;
    }
    int anchor = c->image[c->mback[c->mback_off[i]]];
    for (int k = c->gadjoff[anchor]; k < c->gadjoff[anchor + 1]; k++) {
        int v = c->gadjlist[k];
        if (c->used[v] || c->glab[v] != c->mlab_ord[i]) continue;
        int ok = 1;
        for (int b = c->mback_off[i] + 1; b < c->mback_off[i + 1]; b++) {
            int w = c->image[c->mback[b]];
            int adj = 0;
            for (int k2 = c->gadjoff[v]; k2 < c->gadjoff[v + 1]; k2++)
                if (c->gadjlist[k2] == w) { adj = 1; break; }
            if (!adj) { ok = 0; break; }
        }
        if (!ok) continue;
        c->used[v] = 1; c->image[i] = v;
        if (motif_extend(c, i + 1)) return 1;
        c->used[v] = 0;
    }
    return 0;
}

/* Does a graph in CG form (adjacency built) contain the motif? */
static int cg_has_motif(const CG *g, int mn, const uint16_t *mlab_ord,
                        const int *mback_off, const int *mback) {
    if (mn > g->n) return 0;
    uint8_t used[4096];
    int image[256];
    memset(used, 0, g->n > 0 ? (size_t)g->n : 1);
    MotifCtx c;
    c.gn = g->n; c.glab = g->lab;
    c.gadjoff = g->adjoff; c.gadjlist = g->adjlist;
    c.mn = mn; c.mlab_ord = mlab_ord;
    c.mback_off = mback_off; c.mback = mback;
    c.used = used; c.image = image; c.morder = NULL;
    return motif_extend(&c, 0);
}

/* --- expand: full one-edit neighborhood with keys + embeddings ------- */

typedef struct {
    uint8_t *arena;          /* key bytes arena */
    size_t arena_len, arena_cap;
    size_t *key_off;         /* offsets into arena */
    Py_ssize_t *key_len;
    uint32_t *edit_code;
    float *zrows;            /* count x dim */
    uint8_t *accept;         /* classifier accept flag per entry */
    int count, cap;
    /* dedup table */
    uint32_t *slots;         /* index + 1 */
    size_t nslots;
} ExpandOut;

static int expand_emit(ExpandOut *out, int dim, const uint8_t *key,
                       Py_ssize_t klen, uint32_t code, const double *vec,
                       uint8_t acc) {
    /* dedup by key bytes */
    uint8_t hh[16];
    murmur128(key, (size_t)klen, hh);
    uint64_t h = load64(hh);
    if ((size_t)out->count * 10 >= out->nslots * 7) {
        size_t newsize = out->nslots ? out->nslots * 2 : 256;
        uint32_t *ns = (uint32_t *)calloc(newsize, sizeof(uint32_t));
        for (size_t i = 0; i < out->nslots; i++) {
            if (!out->slots[i]) continue;
            uint32_t idx = out->slots[i] - 1;
            uint8_t h2[16];
            murmur128(out->arena + out->key_off[idx],
                      (size_t)out->key_len[idx], h2);
            size_t j = load64(h2) & (newsize - 1);
            while (ns[j]) j = (j + 1) & (newsize - 1);
            ns[j] = idx + 1;
        }
        free(out->slots);
        out->slots = ns;
        out->nslots = newsize;
    }
    size_t mask = out->nslots - 1;
    size_t j = h & mask;
    while (out->slots[j]) {
        uint32_t idx = out->slots[j] - 1;
        if (out->key_len[idx] == klen
                && memcmp(out->arena + out->key_off[idx], key, klen) == 0)
            return 0;  /* duplicate */
        j = (j + 1) & mask;
    }
    if (out->count >= out->cap) {
        int nc = out->cap ? out->cap * 2 : 128;
        out->key_off = (size_t *)realloc(out->key_off, nc * sizeof(size_t));
        out->key_len = (Py_ssize_t *)realloc(out->key_len, nc * sizeof(Py_ssize_t));
        out->edit_code = (uint32_t *)realloc(out->edit_code, nc * sizeof(uint32_t));
        out->zrows = (float *)realloc(out->zrows, (size_t)nc * dim * sizeof(float));
        out->accept = (uint8_t *)realloc(out->accept, nc);
        out->cap = nc;
    }
    if (out->arena_len + klen > out->arena_cap) {
        out->arena_cap = (out->arena_len + klen) * 2 + 256;
        out->arena = (uint8_t *)realloc(out->arena, out->arena_cap);
    }
    int idx = out->count++;
    out->key_off[idx] = out->arena_len;
    out->key_len[idx] = klen;
    memcpy(out->arena + out->arena_len, key, klen);
    out->arena_len += klen;
    out->edit_code[idx] = code;
    out->accept[idx] = acc;
    float *row = out->zrows + (size_t)idx * dim;
    for (int i = 0; i < dim; i++) row[i] = (float)vec[i];
    out->slots[j] = idx + 1;
    return 1;
}

/* edit codes: kind << 24 | a << 12 | b */
#define EDIT_INSERT_NODE 0
#define EDIT_DELETE_NODE 1
#define EDIT_INSERT_EDGE 2
#define EDIT_DELETE_EDGE 3
#define EDIT_RELABEL     4

static PyObject *fs_expand(PyObject *self, PyObject *args) {
    Py_buffer labels, edges, alphabet, salt, own;
    Py_buffer mlab = {NULL}, mboff = {NULL}, mbtgt = {NULL};
    int rounds, exact_cap, dim, neighbor_cap;
    double scale;
    if (!PyArg_ParseTuple(args, "y*y*y*iiiy*dy*i|y*y*y*", &labels, &edges,
                          &alphabet, &rounds, &exact_cap, &dim, &salt, &scale,
                          &own, &neighbor_cap, &mlab, &mboff, &mbtgt))
        return NULL;
    int have_motif = (mlab.buf != NULL);
    CG parent;
    uint16_t *plab;
    uint16_t (*pedge)[2];
    if (parse_graph(&labels, &edges, &parent, &plab, &pedge) < 0) {
        PyBuffer_Release(&labels); PyBuffer_Release(&edges);
        PyBuffer_Release(&alphabet); PyBuffer_Release(&salt); PyBuffer_Release(&own);
        PyBuffer_Release(&mlab); PyBuffer_Release(&mboff); PyBuffer_Release(&mbtgt);
        PyErr_SetString(PyExc_ValueError, "unregistered label id");
        return NULL;
    }
    int n = parent.n, m = parent.m;
    if (n >= 4095 || rounds > MAX_ROUNDS) {
        PyBuffer_Release(&labels); PyBuffer_Release(&edges);
        PyBuffer_Release(&alphabet); PyBuffer_Release(&salt); PyBuffer_Release(&own);
        PyBuffer_Release(&mlab); PyBuffer_Release(&mboff); PyBuffer_Release(&mbtgt);
        PyErr_SetString(PyExc_ValueError, "graph too large for fast expansion");
        return NULL;
    }
    const uint16_t *alpha = (const uint16_t *)alphabet.buf;
    int nalpha = (int)(alphabet.len / 2);
    BucketTab *bt = bucket_tab((const uint8_t *)salt.buf, (size_t)salt.len, dim);

    /* child scratch: up to n+1 nodes, m+1 edges */
    int cn_max = n + 1, cm_max = m + 1;
    uint16_t *clab = (uint16_t *)malloc(cn_max * sizeof(uint16_t));
    uint16_t (*cedge)[2] = (uint16_t (*)[2])malloc((size_t)cm_max * 2 * sizeof(uint16_t));
    int *adjoff = (int *)malloc((cn_max + 1) * sizeof(int));
    uint16_t *adjlist = (uint16_t *)malloc((2 * (size_t)cm_max + 1) * sizeof(uint16_t));
    uint32_t *colors = (uint32_t *)malloc((size_t)(rounds + 1) * cn_max * sizeof(uint32_t) + 4);
    double *vec = (double *)malloc(dim * sizeof(double));
    int *deg = (int *)calloc(n + 1, sizeof(int));
    for (int i = 0; i < m; i++) { deg[pedge[i][0]]++; deg[pedge[i][1]]++; }

    ExpandOut out;
    memset(&out, 0, sizeof(out));

    int failed = 0, over_cap = 0;
    CG child;
    child.lab = clab;
    child.edges = cedge;

#define RUN_CHILD(code)                                                     \
    do {                                                                    \
        maybe_reset();                                                      \
        build_adj(&child, adjoff, adjlist);                                 \
        uint8_t *key; Py_ssize_t klen;                                      \
        if (analyze_cg(&child, rounds, exact_cap, bt, scale, colors,        \
                       &key, &klen, vec) < 0) { failed = 1; break; }        \
        if (klen == own.len && memcmp(key, own.buf, klen) == 0) break;      \
        uint8_t acc = 0;                                                    \
        if (have_motif)                                                     \
            acc = !cg_has_motif(&child, (int)(mlab.len / 2),                \
                                (const uint16_t *)mlab.buf,                 \
                                (const int *)mboff.buf,                     \
                                (const int *)mbtgt.buf);                    \
        expand_emit(&out, dim, key, klen, (code), vec, acc);                \
        if (neighbor_cap >= 0 && out.count > neighbor_cap) over_cap = 1;    \
    } while (0)

    /* insert-node edits, alphabet order */
    for (int a = 0; a < nalpha && !failed && !over_cap; a++) {
        memcpy(clab, plab, n * sizeof(uint16_t));
        clab[n] = alpha[a];
        memcpy(cedge, pedge, (size_t)m * 2 * sizeof(uint16_t));
        child.n = n + 1; child.m = m;
        RUN_CHILD((EDIT_INSERT_NODE << 24) | alpha[a]);
    }
    /* delete isolated nodes, ascending */
    for (int u = 0; u < n && !failed && !over_cap; u++) {
        if (deg[u] != 0) continue;
        for (int i = 0, j = 0; i < n; i++)
            if (i != u) clab[j++] = plab[i];
        for (int i = 0; i < m; i++) {
            cedge[i][0] = pedge[i][0] > u ? pedge[i][0] - 1 : pedge[i][0];
            cedge[i][1] = pedge[i][1] > u ? pedge[i][1] - 1 : pedge[i][1];
        }
        child.n = n - 1; child.m = m;
        RUN_CHILD((EDIT_DELETE_NODE << 24) | ((uint32_t)u << 12));
    }
    /* edge toggles, (u, v) lexicographic; parent edges are sorted */
    {
        int ei = 0;
        for (int u = 0; u < n && !failed && !over_cap; u++) {
            for (int v = u + 1; v < n && !failed && !over_cap; v++) {
                while (ei < m && (pedge[ei][0] < u
                        || (pedge[ei][0] == u && pedge[ei][1] < v)))
                    ei++;
                int present = (ei < m && pedge[ei][0] == u && pedge[ei][1] == v);
                memcpy(clab, plab, n * sizeof(uint16_t));
                child.n = n;
                if (present) {
                    for (int i = 0, j = 0; i < m; i++) {
                        if (i == ei) continue;
                        cedge[j][0] = pedge[i][0];
                        cedge[j][1] = pedge[i][1];
                        j++;
                    }
                    child.m = m - 1;
                    RUN_CHILD((EDIT_DELETE_EDGE << 24) | ((uint32_t)u << 12) | (uint32_t)v);
                } else {
                    memcpy(cedge, pedge, (size_t)m * 2 * sizeof(uint16_t));
                    cedge[m][0] = (uint16_t)u;
                    cedge[m][1] = (uint16_t)v;
                    child.m = m + 1;
                    RUN_CHILD((EDIT_INSERT_EDGE << 24) | ((uint32_t)u << 12) | (uint32_t)v);
                }
            }
        }
    }
    /* relabels: node ascending, alphabet order */
    for (int u = 0; u < n && !failed && !over_cap; u++) {
        for (int a = 0; a < nalpha && !failed && !over_cap; a++) {
            if (alpha[a] == plab[u]) continue;
            memcpy(clab, plab, n * sizeof(uint16_t));
            clab[u] = alpha[a];
            memcpy(cedge, pedge, (size_t)m * 2 * sizeof(uint16_t));
            child.n = n; child.m = m;
            RUN_CHILD((EDIT_RELABEL << 24) | ((uint32_t)u << 12) | alpha[a]);
        }
    }
#undef RUN_CHILD

    PyObject *result = NULL;
    if (failed) {
        PyErr_SetString(PyExc_RuntimeError, "refinement failed during expansion");
    } else if (over_cap) {
        result = PyTuple_Pack(4, Py_None, Py_None, Py_None, Py_None);
    } else {
        PyObject *keys = PyList_New(out.count);
        PyObject *codes = PyList_New(out.count);
        for (int i = 0; i < out.count; i++) {
            PyList_SET_ITEM(keys, i, PyBytes_FromStringAndSize(
                (const char *)(out.arena + out.key_off[i]), out.key_len[i]));
            PyList_SET_ITEM(codes, i, PyLong_FromUnsignedLong(out.edit_code[i]));
        }
        PyObject *zb = PyBytes_FromStringAndSize(
            (const char *)out.zrows, (Py_ssize_t)out.count * dim * sizeof(float));
        PyObject *acc = have_motif
            ? PyBytes_FromStringAndSize((const char *)out.accept, out.count)
            : (Py_INCREF(Py_None), Py_None);
        result = PyTuple_Pack(4, keys, codes, zb, acc);
        Py_DECREF(keys); Py_DECREF(codes); Py_DECREF(zb); Py_DECREF(acc);
    }
    free(clab); free(cedge); free(adjoff); free(adjlist);
    free(colors); free(vec); free(deg);
    free(out.arena); free(out.key_off); free(out.key_len);
    free(out.edit_code); free(out.zrows); free(out.accept); free(out.slots);
    PyBuffer_Release(&labels); PyBuffer_Release(&edges);
    PyBuffer_Release(&alphabet); PyBuffer_Release(&salt); PyBuffer_Release(&own);
    PyBuffer_Release(&mlab); PyBuffer_Release(&mboff); PyBuffer_Release(&mbtgt);
    return result;
}

/* args: glabels, gedges, motif order labels (u16, in visit order),
 * back-edge offsets (i32, len mn+1), back-edge targets (i32) */
static PyObject *fs_has_motif(PyObject *self, PyObject *args) {
    Py_buffer glab, gedg, mlab, boff, btgt;
    if (!PyArg_ParseTuple(args, "y*y*y*y*y*", &glab, &gedg, &mlab, &boff, &btgt))
        return NULL;
    CG g;
    uint16_t *labbuf;
    uint16_t (*edgebuf)[2];
    g.n = (int)(glab.len / 2);
    g.m = (int)(gedg.len / 4);
    labbuf = (uint16_t *)glab.buf;
    edgebuf = (uint16_t (*)[2])gedg.buf;
    g.lab = labbuf; g.edges = edgebuf;
    int *adjoff = (int *)malloc((g.n + 1) * sizeof(int));
    uint16_t *adjlist = (uint16_t *)malloc((2 * (size_t)g.m + 1) * sizeof(uint16_t));
    build_adj(&g, adjoff, adjlist);
    int found = cg_has_motif(&g, (int)(mlab.len / 2),
                             (const uint16_t *)mlab.buf,
                             (const int *)boff.buf, (const int *)btgt.buf);
    free(adjoff); free(adjlist);
    PyBuffer_Release(&glab); PyBuffer_Release(&gedg);
    PyBuffer_Release(&mlab); PyBuffer_Release(&boff); PyBuffer_Release(&btgt);
    return PyBool_FromLong(found);
}

static PyObject *fs_stats(PyObject *self, PyObject *noargs) {
    return Py_BuildValue("{s:n,s:K,s:K,s:n}",
                         "palette", (Py_ssize_t)g_pal.n,
                         "epoch", (unsigned long long)g_epoch,
                         "resets", (unsigned long long)g_resets,
                         "cap", (Py_ssize_t)g_palette_cap);
}

static PyObject *fs_set_cap(PyObject *self, PyObject *arg) {
    long v = PyLong_AsLong(arg);
    if (v < 0) {
        if (!PyErr_Occurred())
            PyErr_SetString(PyExc_ValueError, "cap must be >= 0");
        return NULL;
    }
    g_palette_cap = (size_t)v;
    Py_RETURN_NONE;
}

static PyObject *fs_reset(PyObject *self, PyObject *noargs) {
    palette_free();
    g_epoch++;
    Py_RETURN_NONE;
}

static PyMethodDef methods[] = {
    {"h128", fs_h128, METH_O, "128-bit stable hash of bytes."},
    {"h64_salted", fs_h64_salted, METH_VARARGS,
     "64-bit salted hash: first 8 big-endian bytes of h128(salt||0x00||data)."},
    {"label_id", fs_label_id, METH_O, "Intern a label, returning its id."},
    {"analyze", fs_analyze, METH_VARARGS,
     "(labels_u16, edges_u16pairs, rounds, exact_cap, dim, salt, scale, want_vec)"
     " -> (key, vec_f64_bytes|None)"},
    {"expand", fs_expand, METH_VARARGS,
     "(labels, edges, alphabet_u16, rounds, exact_cap, dim, salt, scale,"
     " own_key, neighbor_cap[, motif_labels, back_offsets, back_targets])"
     " -> (keys, edit_codes, z_f32_bytes, accepts_u8|None);"
     " all None when over the cap"},
    {"has_motif", fs_has_motif, METH_VARARGS,
     "(glabels, gedges, motif_labels_in_order, back_offsets_i32, back_targets_i32)"
     " -> bool"},
    {"stats", fs_stats, METH_NOARGS, "Palette statistics."},
    {"set_palette_cap", fs_set_cap, METH_O, "Set the palette reset cap."},
    {"reset", fs_reset, METH_NOARGS, "Force a palette reset."},
    {NULL, NULL, 0, NULL},
};

static struct PyModuleDef moduledef = {
    PyModuleDef_HEAD_INIT, "_fastspace",
    "Native edit-space hot path: WL refinement, canonical keys, embeddings.",
    -1, methods,
};

PyMODINIT_FUNC PyInit__fastspace(void) {
    return PyModule_Create(&moduledef);
}
