typedef unsigned char u8;
typedef unsigned long size_t;

/*@ requires '0' <= ch <= 'f';
    ensures -1 <= \result <= 15; */
int hex_to_bin(char ch);

/*@ requires \valid(dst + (0 .. count - 1));
    requires \valid_read(src + (0 .. 2 * count - 1)); */
int hex2bin(u8 *dst, const char *src, size_t count)
{
	//@ ghost const char *osrc = src; ghost size_t ocount = count;
	/*@ loop invariant count <= ocount;
	    loop invariant osrc <= src;
	    loop assigns dst, src, count; */
	while (count--) {
		int hi = hex_to_bin(*src++);
		int lo = hex_to_bin(*src++);
		if ((hi < 0) || (lo < 0))
			return -1;
		//@ assert 0 <= hi && hi <= 15;
		*dst++ = ((u8)hi << 4) | (u8)lo;
	}
	//@ assert osrc <= src;
	return 0;
}
