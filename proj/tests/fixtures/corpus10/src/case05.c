/* case05 line 1 */
/* case05 line 2 */
/* case05 line 3 */
/* case05 line 4 */
/* case05 line 5 */
/* case05 line 6 */
/* case05 line 7 */
/* case05 line 8 */
/* case05 line 9 */
/* case05 line 10 */
/* case05 line 11 */
/* case05 line 12 */
/* case05 line 13 */
/* case05 line 14 */
/* case05 line 15 */
/* case05 line 16 */
/* case05 line 17 */
/* case05 line 18 */
/* case05 line 19 */
/* case05 line 20 */
/* case05 line 21 */
/* case05 line 22 */
/* case05 line 23 */
/* case05 line 24 */
/* case05 line 25 */
/* case05 line 26 */
/* case05 line 27 */
/* case05 line 28 */
/* case05 line 29 */
/* case05 line 30 */
/* case05 line 31 */
/* case05 line 32 */
/* case05 line 33 */
/* case05 line 34 */
/* case05 line 35 */
/* case05 line 36 */
/* case05 line 37 */
/* case05 line 38 */
/* case05 line 39 */
/* case05 line 40 */
